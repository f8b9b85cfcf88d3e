#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "multihaz/cohort.hpp"
#include "multihaz/dgp.hpp"

namespace multihaz {

struct SimulateOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> m;
  std::string out_dir = ".";
};

struct SimulateResult {
  std::filesystem::path lattice_path;
  std::filesystem::path cohort_path;
  std::filesystem::path manifest_path;
  DGPConfig config;
};

/// Writes lattice.csv, cohort.csv, and manifest.json under out_dir.
/// Deterministic: the data files are byte-identical across reruns of the
/// same resolved config.
SimulateResult cmd_simulate(const SimulateOptions& options);

struct EstimateOptions {
  std::string cohort_path;
  CsvSchema schema;
  std::vector<int> arms = {0, 1};
  std::optional<double> tau; // defaults to the last event time
  std::vector<std::string> kinds; // subset of marginal, cct, icp, conditional
  std::string out_dir = ".";
};

struct EstimateResult {
  std::vector<std::filesystem::path> curve_paths;
  std::filesystem::path summary_path;
  std::filesystem::path manifest_path;
};

/// One CSV per (kind, arm) — per (kind, stratum, arm) for conditional —
/// plus summary.json with cumulative/average measures and warnings.
EstimateResult cmd_estimate(const EstimateOptions& options);

struct MultiverseOptions {
  std::string lattice_path;
  std::optional<double> tau;
  std::string out_dir = ".";
};

struct MultiverseResult {
  std::filesystem::path report_path;
  std::filesystem::path manifest_path;
  bool all_bounds_hold = true;
};

MultiverseResult cmd_multiverse(const MultiverseOptions& options);

struct VerifyOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> preset; // defaults to the "default" preset
  std::optional<std::uint64_t> seed; // base seed override
  std::optional<int> m;
  int seeds = 50;                    // number of consecutive seeds
  double tolerance = 0.08;           // oracle-check tolerance
  std::optional<std::string> out_dir;
};

struct VerifyResult {
  struct SeedOutcome {
    std::uint64_t seed = 0;
    bool lattice_valid = true;
    bool bounds_ok = true;
    bool equality_ok = true; // single-world exact equality, when J == 1
    bool collapsibility_ok = true;
    double oracle_max_diff = 0.0;
    bool oracle_ok = true;
    bool increments_in_range = true;
  };
  std::vector<SeedOutcome> outcomes;
  bool pass = false;
};

/// Runs simulate -> estimate -> multiverse -> oracle-check for each seed
/// and aggregates. Progress is written to `log`.
VerifyResult cmd_verify(const VerifyOptions& options, std::ostream& log);

}  // namespace multihaz
