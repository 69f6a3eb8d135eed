#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tmann/commands.hpp"

namespace {

int dispatch(const std::string& command, tmann::RunConfig& config) {
  if (command == "run") return tmann::cmd_run(config, std::cout);
  if (command == "rates") return tmann::cmd_rates(config, std::cout);
  if (command == "validate") return tmann::cmd_validate(config, std::cout);
  if (command == "compare") return tmann::cmd_compare(config, std::cout);
  throw tmann::InputError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Tikhonov-Mann iteration toolkit: runs the iteration on concrete "
      "geodesic spaces, computes certified integer rates of asymptotic "
      "regularity, and validates every bound empirically."};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> horizon, kmax, slack, stride, seed, out_dir;
  std::optional<std::size_t> sabotage;
  bool statement_literal_sigma5 = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file")->required();
    cmd->add_option("--horizon", horizon, "override: iteration length");
    cmd->add_option("--kmax", kmax, "override: largest k checked");
    cmd->add_option("--slack", slack, "override: comparison slack");
    cmd->add_option("--stride", stride, "override: sampling stride");
    cmd->add_option("--seed", seed, "override: sampling seed");
    cmd->add_option("--out", out_dir, "override: output directory");
  };

  CLI::App* run = app.add_subcommand("run", "run the orbit and write the trace CSV");
  CLI::App* rates = app.add_subcommand("rates", "emit the rate table CSV");
  CLI::App* validate =
      app.add_subcommand("validate", "validate moduli, axioms, inequalities and rates");
  CLI::App* compare =
      app.add_subcommand("compare", "closed forms vs generic pipeline, exact equality");
  for (CLI::App* cmd : {run, rates, validate, compare}) add_common(cmd);
  validate->add_flag("--statement-literal-sigma5", statement_literal_sigma5,
                     "also evaluate the t-gap rate whose beta_to_one argument "
                     "omits the lambda factor, and report both");
  validate->add_option("--sabotage-beta", sabotage,
                       "perturb beta at this index (engineered failure)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    tmann::RunConfig config = tmann::parse_config_file(config_path);
    if (horizon) tmann::apply_override(config, "horizon", *horizon);
    if (kmax) tmann::apply_override(config, "kmax", *kmax);
    if (slack) tmann::apply_override(config, "slack", *slack);
    if (stride) tmann::apply_override(config, "stride", *stride);
    if (seed) tmann::apply_override(config, "seed", *seed);
    if (out_dir) tmann::apply_override(config, "out", *out_dir);
    config.compare_beta_to_one_args = statement_literal_sigma5;
    config.sabotage_beta_index = sabotage;
    return dispatch(app.get_subcommands().front()->get_name(), config);
  } catch (const tmann::InputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tmann::RateOverflowError& e) {
    std::cerr << "rate overflow: " << e.what() << "\n";
    return 3;
  } catch (const tmann::HorizonError& e) {
    std::cerr << "horizon error: " << e.what() << "\n";
    return 4;
  } catch (const tmann::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
