#include "multihaz/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "multihaz/errors.hpp"
#include "multihaz/estimators.hpp"
#include "multihaz/io.hpp"
#include "multihaz/multiverse.hpp"
#include "multihaz/risk_table.hpp"
#include "multihaz/version.hpp"

namespace multihaz {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path prepare_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  return dir;
}

void write_manifest(const fs::path& path, const std::string& command,
                    const nlohmann::json& config, const nlohmann::json& seed,
                    const nlohmann::json& inputs, const nlohmann::json& outputs,
                    double duration_seconds) {
  nlohmann::json manifest{{"command", command},
                          {"version", std::string(kVersion)},
                          {"seed", seed},
                          {"config", config},
                          {"inputs", inputs},
                          {"outputs", outputs},
                          {"duration_seconds", duration_seconds}};
  write_file(path.string(), manifest.dump(2) + "\n");
}

DGPConfig resolve_config(const std::optional<std::string>& config_path,
                         const std::optional<std::string>& preset,
                         const std::optional<std::uint64_t>& seed,
                         const std::optional<int>& m) {
  if (config_path && preset)
    throw ConfigError("give either --config or --preset, not both");
  DGPConfig config;
  if (preset) {
    config = make_preset(*preset, PresetOverrides{m, seed});
  } else if (config_path) {
    config = load_config(*config_path);
    if (seed) config.seed = *seed;
    if (m) config.m = *m;
  } else {
    throw ConfigError("a --config file or --preset name is required");
  }
  validate_config(config);
  return config;
}

std::string sanitize_for_filename(const std::string& label) {
  std::string out;
  out.reserve(label.size());
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? std::string("x") : out;
}

}  // namespace

SimulateResult cmd_simulate(const SimulateOptions& options) {
  const auto start = Clock::now();
  DGPConfig config = resolve_config(options.config_path, options.preset, options.seed,
                                    options.m);
  const PotentialOutcomeLattice lattice = generate_lattice(config);
  const Cohort cohort = observe(lattice, config);

  const fs::path dir = prepare_out_dir(options.out_dir);
  SimulateResult result;
  result.config = config;
  result.lattice_path = dir / "lattice.csv";
  result.cohort_path = dir / "cohort.csv";
  result.manifest_path = dir / "manifest.json";
  write_file(result.lattice_path.string(), lattice_csv(lattice));
  write_file(result.cohort_path.string(), cohort_csv(cohort));

  nlohmann::json inputs;
  if (options.config_path) inputs["config_path"] = *options.config_path;
  if (options.preset) inputs["preset"] = *options.preset;
  write_manifest(result.manifest_path, "simulate", config_to_json(config), config.seed,
                 inputs,
                 {{"lattice", result.lattice_path.string()},
                  {"cohort", result.cohort_path.string()}},
                 seconds_since(start));
  return result;
}

EstimateResult cmd_estimate(const EstimateOptions& options) {
  const auto start = Clock::now();
  if (options.kinds.empty()) throw ConfigError("no estimator kinds requested");
  if (options.arms.empty()) throw ConfigError("no arms requested");

  std::vector<std::string> kinds;
  for (const std::string& kind : options.kinds) {
    if (kind == "all") {
      kinds.insert(kinds.end(), {"marginal", "cct", "icp"});
    } else if (kind == "marginal" || kind == "cct" || kind == "icp" ||
               kind == "conditional") {
      kinds.push_back(kind);
    } else {
      throw ConfigError("unknown estimator kind '" + kind +
                        "' (expected marginal, cct, icp, conditional, or all)");
    }
  }
  std::vector<int> arms;
  for (int arm : options.arms) {
    if (arm != 0 && arm != 1) throw ConfigError("arm must be 0 or 1");
    if (std::find(arms.begin(), arms.end(), arm) == arms.end()) arms.push_back(arm);
  }

  const Cohort cohort = load_cohort(options.cohort_path, options.schema);
  const RiskTable table = build_risk_table(cohort);
  const double tau = options.tau.value_or(cohort.grid.back());

  std::vector<HazardCurve> curves;
  for (const std::string& kind : kinds) {
    for (int arm : arms) {
      if (kind == "marginal") curves.push_back(marginal_nelson_aalen(table, arm));
      else if (kind == "cct") curves.push_back(cct_hazard(table, arm));
      else if (kind == "icp") curves.push_back(icp_hazard(table, arm));
      else
        for (std::size_t x = 0; x < table.strata_count(); ++x)
          curves.push_back(conditional_hazard(table, arm, x));
    }
  }

  const fs::path dir = prepare_out_dir(options.out_dir);
  EstimateResult result;
  std::unordered_set<std::string> used_names;
  nlohmann::json summary_entries = nlohmann::json::array();
  for (const HazardCurve& curve : curves) {
    std::string name(to_string(curve.kind));
    if (curve.kind == HazardKind::conditional)
      name += "_" + sanitize_for_filename(curve.stratum);
    name += "_arm" + std::to_string(curve.arm);
    std::string unique = name;
    for (int suffix = 2; !used_names.insert(unique).second; ++suffix)
      unique = name + "_" + std::to_string(suffix);

    const fs::path path = dir / (unique + ".csv");
    write_file(path.string(), curve_csv(curve));
    result.curve_paths.push_back(path);

    nlohmann::json entry = curve_to_json(curve);
    entry["file"] = path.string();
    entry["summary"] = summary_to_json(summarize(curve, tau));
    summary_entries.push_back(std::move(entry));
  }

  result.summary_path = dir / "summary.json";
  write_file(result.summary_path.string(),
             nlohmann::json{{"tau", tau}, {"curves", summary_entries}}.dump(2) + "\n");

  result.manifest_path = dir / "manifest.json";
  nlohmann::json outputs{{"summary", result.summary_path.string()}};
  nlohmann::json files = nlohmann::json::array();
  for (const fs::path& path : result.curve_paths) files.push_back(path.string());
  outputs["curves"] = files;
  write_manifest(result.manifest_path, "estimate",
                 {{"kinds", kinds}, {"arms", arms}, {"tau", tau}}, nullptr,
                 {{"cohort_path", options.cohort_path}}, outputs, seconds_since(start));
  return result;
}

MultiverseResult cmd_multiverse(const MultiverseOptions& options) {
  const auto start = Clock::now();
  const PotentialOutcomeLattice lattice = load_lattice(options.lattice_path);
  const double tau = options.tau.value_or(lattice.times.back());
  const MultiverseReport report = multiverse_summary(lattice, tau);

  const fs::path dir = prepare_out_dir(options.out_dir);
  MultiverseResult result;
  result.all_bounds_hold = report.all_bounds_hold();
  result.report_path = dir / "report.json";
  write_file(result.report_path.string(), report_to_json(report).dump(2) + "\n");
  result.manifest_path = dir / "manifest.json";
  write_manifest(result.manifest_path, "multiverse", {{"tau", tau}}, nullptr,
                 {{"lattice_path", options.lattice_path}},
                 {{"report", result.report_path.string()}}, seconds_since(start));
  return result;
}

VerifyResult cmd_verify(const VerifyOptions& options, std::ostream& log) {
  if (options.seeds < 1) throw ConfigError("--seeds must be at least 1");
  DGPConfig base;
  if (options.config_path || options.preset) {
    base = resolve_config(options.config_path, options.preset, options.seed, options.m);
  } else {
    base = scenario_default(PresetOverrides{options.m, options.seed});
  }
  if (!(options.tolerance >= 0.0))
    throw ConfigError("--tolerance must be non-negative");

  VerifyResult result;
  for (int s = 0; s < options.seeds; ++s) {
    DGPConfig config = base;
    config.seed = base.seed + static_cast<std::uint64_t>(s);

    VerifyResult::SeedOutcome outcome;
    outcome.seed = config.seed;

    const PotentialOutcomeLattice lattice = generate_lattice(config);
    outcome.lattice_valid = validate_lattice(lattice).empty();

    for (double tau : lattice.times) {
      const MultiverseReport report = multiverse_summary(lattice, tau);
      if (!report.all_bounds_hold()) outcome.bounds_ok = false;
    }

    if (lattice.worlds() == 1) {
      const MultiverseReport report = multiverse_summary(lattice, lattice.times[0]);
      auto exact = [](const ScopeSummary& scope) {
        return scope.cumulative == scope.average && scope.average == scope.actual_risk;
      };
      outcome.equality_ok =
          exact(report.pooled) && exact(report.by_arm[0]) && exact(report.by_arm[1]);
    }

    const Cohort cohort = observe(lattice, config);
    if (!cohort.grid.empty()) {
      const RiskTable table = build_risk_table(cohort);
      for (int arm : {0, 1}) {
        std::vector<HazardCurve> curves{marginal_nelson_aalen(table, arm),
                                        cct_hazard(table, arm), icp_hazard(table, arm)};
        for (std::size_t x = 0; x < table.strata_count(); ++x)
          curves.push_back(conditional_hazard(table, arm, x));
        for (const HazardCurve& curve : curves)
          for (double inc : curve.increments)
            if (!(inc >= 0.0 && inc <= 1.0)) outcome.increments_in_range = false;
        if (table.strata_count() >= 2) {
          const CollapsibilityGaps gaps = collapsibility_gap(table, arm);
          for (double gap : gaps.icp_gap)
            if (std::abs(gap) > 1e-12) outcome.collapsibility_ok = false;
        }
      }
    }

    const OracleComparison oracle = estimator_oracle_check(lattice, options.tolerance);
    outcome.oracle_max_diff = oracle.max_abs_diff;
    outcome.oracle_ok = oracle.within_tolerance;

    log << "seed " << outcome.seed << ": lattice "
        << (outcome.lattice_valid ? "ok" : "INVALID") << ", bounds "
        << (outcome.bounds_ok ? "ok" : "FAIL") << ", equality "
        << (outcome.equality_ok ? "ok" : "FAIL") << ", collapsibility "
        << (outcome.collapsibility_ok ? "ok" : "FAIL") << ", increments "
        << (outcome.increments_in_range ? "ok" : "FAIL") << ", oracle max |diff| "
        << outcome.oracle_max_diff << " "
        << (outcome.oracle_ok ? "<= " : "> ") << options.tolerance
        << (outcome.oracle_ok ? " ok" : " FAIL") << "\n";
    result.outcomes.push_back(outcome);
  }

  result.pass = true;
  for (const VerifyResult::SeedOutcome& outcome : result.outcomes) {
    if (!(outcome.lattice_valid && outcome.bounds_ok && outcome.equality_ok &&
          outcome.collapsibility_ok && outcome.increments_in_range && outcome.oracle_ok))
      result.pass = false;
  }

  if (options.out_dir) {
    const fs::path dir = prepare_out_dir(*options.out_dir);
    nlohmann::json outcomes = nlohmann::json::array();
    for (const VerifyResult::SeedOutcome& outcome : result.outcomes) {
      outcomes.push_back({{"seed", outcome.seed},
                          {"lattice_valid", outcome.lattice_valid},
                          {"bounds_ok", outcome.bounds_ok},
                          {"equality_ok", outcome.equality_ok},
                          {"collapsibility_ok", outcome.collapsibility_ok},
                          {"increments_in_range", outcome.increments_in_range},
                          {"oracle_max_diff", outcome.oracle_max_diff},
                          {"oracle_ok", outcome.oracle_ok}});
    }
    nlohmann::json report{{"pass", result.pass},
                          {"seeds", options.seeds},
                          {"tolerance", options.tolerance},
                          {"base_config", config_to_json(base)},
                          {"outcomes", outcomes}};
    write_file((dir / "verify_report.json").string(), report.dump(2) + "\n");
  }
  return result;
}

}  // namespace multihaz
