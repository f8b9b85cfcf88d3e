#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multihaz/cohort.hpp"
#include "multihaz/multiverse.hpp"

namespace multihaz {

struct AssignmentConfig {
  enum class Kind { randomized, confounded };
  Kind kind = Kind::randomized;
  double p = 0.5;                     // randomized: P(Z = 1)
  std::vector<double> p_by_stratum;   // confounded: P(Z = 1 | X = x)
};

/// Latent binary class multiplying a subject's hazards. Unmeasured: it is
/// never emitted into cohorts or lattices.
struct FrailtyConfig {
  double prevalence = 0.0;
  double hazard_multiplier = 1.0;
};

/// Data-generating process. hazards is a [stratum][arm][time] table
/// flattened as (x * 2 + z) * J + j.
struct DGPConfig {
  int m = 0;
  std::vector<double> times;
  std::vector<std::string> strata;
  std::vector<double> strata_probs;
  AssignmentConfig assignment;
  std::vector<double> hazards;
  std::optional<FrailtyConfig> frailty;
  std::vector<double> censoring; // per-time probability; empty = none
  std::uint64_t seed = 0;

  double hazard(std::size_t j, int arm, std::size_t x) const {
    return hazards[(x * 2 + static_cast<std::size_t>(arm)) * times.size() + j];
  }
  double& hazard(std::size_t j, int arm, std::size_t x) {
    return hazards[(x * 2 + static_cast<std::size_t>(arm)) * times.size() + j];
  }
};

/// Throws ConfigError on any out-of-range probability, non-increasing
/// times, size mismatch, or an effective hazard (frailty applied) outside
/// [0, 1].
void validate_config(const DGPConfig& config);

/// Draws a ground-truth lattice. All randomness is keyed by
/// (seed, subject, time, purpose), so identical configs produce identical
/// lattices regardless of evaluation order. Subjects are i.i.d.: stratum,
/// latent frailty, then arm; the actual death is the first success of the
/// per-time event draws; entries after it are fresh re-death draws at the
/// subject's own effective hazard.
PotentialOutcomeLattice generate_lattice(const DGPConfig& config);

/// Derives the observed cohort: the lattice's actual world overlaid with
/// independent per-time censoring draws. A death at t_j takes precedence
/// over a censoring draw at the same t_j; a subject censored at t_j exits
/// with followup_time = t_j and still counts as at risk there. Frailty is
/// not emitted. With censoring disabled the event times match the lattice
/// exactly.
Cohort observe(const PotentialOutcomeLattice& lattice, const DGPConfig& config);

struct PresetOverrides {
  std::optional<int> m;
  std::optional<std::uint64_t> seed;
};

/// Two latent health classes and a beneficial treatment: the control arm's
/// surviving population grows healthier over time, so the marginal
/// between-arm hazard ratio drifts toward 1 while each class's own ratio
/// stays constant.
DGPConfig scenario_selection_bias(const PresetOverrides& overrides = {});

/// Strong stratum effect on the hazard under balanced randomization and no
/// frailty: the standardized-population (cct) hazard falls below the
/// stratum-weighted (icp) hazard once high-hazard strata deplete.
DGPConfig scenario_noncollapsible(const PresetOverrides& overrides = {});

/// Mild two-stratum randomized design used when no config is supplied.
DGPConfig scenario_default(const PresetOverrides& overrides = {});

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
DGPConfig make_preset(const std::string& name, const PresetOverrides& overrides = {});
std::string preset_description(const std::string& name);

/// Re-expresses latent frailty classes as measured strata: each stratum x
/// splits into x_robust / x_frail with the frail hazards multiplied out.
/// Used to run an adjusted analysis in which the classes are observable.
/// Throws ConfigError when the config has no frailty.
DGPConfig fold_frailty_into_strata(const DGPConfig& config);

}  // namespace multihaz
