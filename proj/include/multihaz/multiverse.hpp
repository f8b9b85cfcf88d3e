#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multihaz/cohort.hpp"

namespace multihaz {

struct LatticeSubject {
  std::int64_t id = 0;
  int arm = 0;
  int stratum = 0; // index into PotentialOutcomeLattice::strata
  std::optional<std::size_t> death_index; // world of actual death, 0-based
};

/// Per-subject, per-time binary potential-death matrix. Column j describes
/// the j-th possible world: the world identical to the actual one at
/// baseline in which deaths may occur only at t_j.
///
/// Coupling rules relating the matrix to the actual world:
///   - a subject who survives t_j in the actual world survives world j
///     (deaths[i][j] == 0 for j < death_index, and everywhere when the
///     subject never dies);
///   - a subject who dies at t_j in the actual world dies in world j
///     (deaths[i][death_index] == 1);
///   - entries after the actual death are free potential outcomes.
///
/// Lattices represent complete, uncensored ground truth; censoring only
/// enters when deriving an observed cohort. Immutable after construction.
struct PotentialOutcomeLattice {
  std::vector<double> times; // t_1..t_J
  std::vector<std::string> strata;
  std::vector<LatticeSubject> subjects;
  std::vector<std::uint8_t> deaths; // m x J, row-major

  int size() const { return static_cast<int>(subjects.size()); }
  std::size_t worlds() const { return times.size(); }
  std::uint8_t death(std::size_t i, std::size_t j) const {
    return deaths[i * times.size() + j];
  }
};

struct LatticeViolation {
  std::size_t subject = 0;
  std::size_t world = 0;
  std::string what;
};

/// Checks every coupling rule cell by cell; empty result means valid.
std::vector<LatticeViolation> validate_lattice(const PotentialOutcomeLattice& lattice);

/// One column of the lattice, summarized. Per-arm risks use the arm's full
/// baseline size: nobody has been depleted in a possible world.
struct PossibleWorld {
  std::size_t index = 0;
  double time = 0.0;
  std::vector<std::int64_t> death_ids;
  int deaths_total = 0;
  std::array<int, 2> deaths_by_arm{0, 0};
  double risk_total = 0.0;
  std::array<double, 2> risk_by_arm{0.0, 0.0};
};

/// Extracts world j (0-based). Depends only on column j of the death
/// matrix. Throws ConfigError when j >= worlds().
PossibleWorld world(const PotentialOutcomeLattice& lattice, std::size_t j);

/// Scope = pooled population or one arm. The bound flags are evaluated on
/// exact death counts, not on the rounded double summaries (which can land
/// one ulp past the equality point of the chain).
struct ScopeSummary {
  int size = 0;               // population in scope
  double cumulative = 0.0;    // sum over t_j <= tau of d_j / size
  double average = 0.0;       // cumulative / worlds_used
  double actual_risk = 0.0;   // sum over t_j <= tau of actual deaths / size
  bool lower_bound_ok = true; // average <= actual_risk
  bool upper_bound_ok = true; // actual_risk <= cumulative
};

struct MultiverseReport {
  double tau = 0.0;
  int worlds_used = 0; // grid times <= tau, shared by all scopes
  ScopeSummary pooled;
  std::array<ScopeSummary, 2> by_arm;

  // Per-time diagnostics over the whole grid; index 0 = pooled, 1 = arm 0,
  // 2 = arm 1.
  struct TimeRow {
    double time = 0.0;
    std::array<int, 3> actual_deaths{0, 0, 0};
    std::array<int, 3> world_deaths{0, 0, 0};
    std::array<bool, 3> actual_le_world{true, true, true};
    // world deaths <= actual deaths accumulated through t_j (the tight
    // version of the bound; implies the total-deaths comparison)
    std::array<bool, 3> world_le_cum_actual{true, true, true};
  };
  std::vector<TimeRow> per_time;

  bool all_bounds_hold() const;
};

/// Cumulative/average hazard, actual risk, and bound flags at horizon tau,
/// pooled and per arm. Throws ConfigError when tau precedes the first world
/// time.
MultiverseReport multiverse_summary(const PotentialOutcomeLattice& lattice, double tau);

/// Invariant validation plus the full bound check. Fails only when the
/// lattice violates its own coupling rules: given a valid lattice the
/// inequalities hold by construction, so a failed flag signals a bug.
struct BoundsCheck {
  bool pass = true;
  std::vector<LatticeViolation> violations;
  std::vector<std::string> failures; // failed inequality descriptions
  MultiverseReport report;
};

BoundsCheck verify_bounds(const PotentialOutcomeLattice& lattice, double tau);

/// The actual world of a lattice as an observed, uncensored cohort:
/// followup at the death time with event = 1, or at the last world time
/// with event = 0 for subjects who never die.
Cohort actual_cohort(const PotentialOutcomeLattice& lattice);

/// Comparison of world-j per-arm risks against the stratified icp estimator
/// evaluated on the lattice's actual-world cohort. Meaningful for lattices
/// from a randomized design: under confounded assignment, per-arm world
/// risks reflect the arm's own covariate mix while the estimator
/// standardizes to the pooled population, and the two legitimately differ.
struct OracleComparison {
  struct Entry {
    double time = 0.0;
    int arm = 0;
    double world_risk = 0.0;
    double estimator_increment = 0.0;
  };
  std::vector<Entry> entries;
  double max_abs_diff = 0.0;
  double tolerance = 0.0;
  bool within_tolerance = true;
};

/// Discrepancies beyond tolerance are reported, never thrown.
OracleComparison estimator_oracle_check(const PotentialOutcomeLattice& lattice,
                                        double tolerance);

}  // namespace multihaz
