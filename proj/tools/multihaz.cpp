#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multihaz/commands.hpp"
#include "multihaz/dgp.hpp"
#include "multihaz/errors.hpp"
#include "multihaz/version.hpp"

namespace {

using namespace multihaz;

int run_simulate(const SimulateOptions& options) {
  const SimulateResult result = cmd_simulate(options);
  std::cout << "wrote " << result.lattice_path.string() << "\n"
            << "wrote " << result.cohort_path.string() << "\n"
            << "wrote " << result.manifest_path.string() << "\n";
  return 0;
}

int run_estimate(const EstimateOptions& options) {
  const EstimateResult result = cmd_estimate(options);
  for (const auto& path : result.curve_paths)
    std::cout << "wrote " << path.string() << "\n";
  std::cout << "wrote " << result.summary_path.string() << "\n"
            << "wrote " << result.manifest_path.string() << "\n";
  return 0;
}

int run_multiverse(const MultiverseOptions& options) {
  const MultiverseResult result = cmd_multiverse(options);
  std::cout << "wrote " << result.report_path.string() << "\n"
            << "wrote " << result.manifest_path.string() << "\n"
            << "bounds " << (result.all_bounds_hold ? "hold" : "VIOLATED") << "\n";
  return result.all_bounds_hold ? 0 : kExitDataError;
}

int run_verify(const VerifyOptions& options) {
  const VerifyResult result = cmd_verify(options, std::cout);
  std::cout << (result.pass ? "PASS" : "FAIL") << " (" << result.outcomes.size()
            << " seed(s))\n";
  return result.pass ? 0 : kExitVerifyFailure;
}

int run_presets() {
  for (const std::string& name : preset_names())
    std::cout << name << " — " << preset_description(name) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete-time hazard estimators with possible-world simulation"};
  app.set_version_flag("--version", std::string(multihaz::kVersion));
  app.require_subcommand(1);

  int exit_code = 0;

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "generate a potential-outcome lattice and observed cohort");
  SimulateOptions simulate_options;
  std::string sim_config, sim_preset;
  std::uint64_t sim_seed = 0;
  int sim_m = 0;
  simulate->add_option("--config", sim_config, "DGP config JSON (or a run manifest)");
  simulate->add_option("--preset", sim_preset, "named preset (see 'presets')");
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "seed override")
                           ->envname("MULTIHAZ_SEED");
  auto* sim_m_opt = simulate->add_option("--m", sim_m, "sample-size override");
  simulate->add_option("--out", simulate_options.out_dir, "output directory")
      ->required();
  simulate->callback([&] {
    if (!sim_config.empty()) simulate_options.config_path = sim_config;
    if (!sim_preset.empty()) simulate_options.preset = sim_preset;
    if (sim_seed_opt->count() > 0) simulate_options.seed = sim_seed;
    if (sim_m_opt->count() > 0) simulate_options.m = sim_m;
    exit_code = run_simulate(simulate_options);
  });

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate", "compute hazard curves and summaries from a cohort CSV");
  EstimateOptions estimate_options;
  double est_tau = 0.0;
  estimate->add_option("--cohort", estimate_options.cohort_path, "cohort CSV path")
      ->required();
  estimate
      ->add_option("--kinds", estimate_options.kinds,
                   "estimators: marginal, cct, icp, conditional, or all")
      ->delimiter(',')
      ->default_val(std::vector<std::string>{"all"});
  estimate->add_option("--arm", estimate_options.arms, "arms to estimate (default both)")
      ->delimiter(',');
  auto* est_tau_opt =
      estimate->add_option("--tau", est_tau, "horizon (default: last event time)");
  estimate->add_option("--out", estimate_options.out_dir, "output directory")
      ->required();
  estimate->add_option("--col-id", estimate_options.schema.id, "id column name");
  estimate->add_option("--col-arm", estimate_options.schema.arm, "arm column name");
  estimate->add_option("--col-stratum", estimate_options.schema.stratum,
                       "stratum column name");
  estimate->add_option("--col-time", estimate_options.schema.time, "time column name");
  estimate->add_option("--col-event", estimate_options.schema.event,
                       "event column name");
  estimate->callback([&] {
    if (est_tau_opt->count() > 0) estimate_options.tau = est_tau;
    exit_code = run_estimate(estimate_options);
  });

  // multiverse
  auto* multiverse = app.add_subcommand(
      "multiverse", "summarize a lattice: per-world deaths, hazards, bound checks");
  MultiverseOptions multiverse_options;
  double mv_tau = 0.0;
  multiverse
      ->add_option("--lattice", multiverse_options.lattice_path, "lattice CSV path")
      ->required();
  auto* mv_tau_opt =
      multiverse->add_option("--tau", mv_tau, "horizon (default: last world time)");
  multiverse->add_option("--out", multiverse_options.out_dir, "output directory")
      ->required();
  multiverse->callback([&] {
    if (mv_tau_opt->count() > 0) multiverse_options.tau = mv_tau;
    exit_code = run_multiverse(multiverse_options);
  });

  // verify
  auto* verify = app.add_subcommand(
      "verify", "run simulate -> estimate -> multiverse -> oracle checks over seeds");
  VerifyOptions verify_options;
  std::string ver_config, ver_preset, ver_out;
  std::uint64_t ver_seed = 0;
  int ver_m = 0;
  verify->add_option("--config", ver_config, "DGP config JSON (or a run manifest)");
  verify->add_option("--preset", ver_preset,
                     "named preset (default: the 'default' preset)");
  auto* ver_seed_opt =
      verify->add_option("--seed", ver_seed, "base seed")->envname("MULTIHAZ_SEED");
  auto* ver_m_opt = verify->add_option("--m", ver_m, "sample-size override");
  verify->add_option("--seeds", verify_options.seeds, "number of consecutive seeds");
  verify->add_option("--tolerance", verify_options.tolerance,
                     "estimator/world-risk oracle tolerance");
  verify->add_option("--out", ver_out, "optional directory for verify_report.json");
  verify->callback([&] {
    if (!ver_config.empty()) verify_options.config_path = ver_config;
    if (!ver_preset.empty()) verify_options.preset = ver_preset;
    if (ver_seed_opt->count() > 0) verify_options.seed = ver_seed;
    if (ver_m_opt->count() > 0) verify_options.m = ver_m;
    if (!ver_out.empty()) verify_options.out_dir = ver_out;
    exit_code = run_verify(verify_options);
  });

  // presets
  auto* presets = app.add_subcommand("presets", "list named presets");
  presets->callback([&] { exit_code = run_presets(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return multihaz::kExitConfigError;
  } catch (const multihaz::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return multihaz::kExitConfigError;
  } catch (const multihaz::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return multihaz::kExitIoError;
  } catch (const multihaz::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return multihaz::kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
