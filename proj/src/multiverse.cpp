#include "multihaz/multiverse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "multihaz/errors.hpp"
#include "multihaz/estimators.hpp"
#include "multihaz/risk_table.hpp"

namespace multihaz {

std::vector<LatticeViolation> validate_lattice(const PotentialOutcomeLattice& lattice) {
  std::vector<LatticeViolation> violations;
  const std::size_t J = lattice.worlds();
  for (std::size_t i = 0; i < lattice.subjects.size(); ++i) {
    const LatticeSubject& subject = lattice.subjects[i];
    if (subject.arm != 0 && subject.arm != 1)
      violations.push_back({i, 0, "arm must be 0 or 1"});
    if (subject.stratum < 0 ||
        static_cast<std::size_t>(subject.stratum) >= lattice.strata.size())
      violations.push_back({i, 0, "stratum index out of range"});
    if (subject.death_index) {
      const std::size_t k = *subject.death_index;
      if (k >= J) {
        violations.push_back({i, k, "actual death index out of range"});
        continue;
      }
      for (std::size_t j = 0; j < k; ++j)
        if (lattice.death(i, j))
          violations.push_back({i, j, "death before the actual death time"});
      if (!lattice.death(i, k))
        violations.push_back({i, k, "actual death missing from its own world"});
    } else {
      for (std::size_t j = 0; j < J; ++j)
        if (lattice.death(i, j))
          violations.push_back({i, j, "death recorded for a subject who never dies"});
    }
  }
  return violations;
}

PossibleWorld world(const PotentialOutcomeLattice& lattice, std::size_t j) {
  if (j >= lattice.worlds())
    throw ConfigError("world index " + std::to_string(j) + " out of range (J = " +
                      std::to_string(lattice.worlds()) + ")");
  PossibleWorld out;
  out.index = j;
  out.time = lattice.times[j];
  std::array<int, 2> arm_sizes{0, 0};
  for (std::size_t i = 0; i < lattice.subjects.size(); ++i) {
    const int arm = lattice.subjects[i].arm;
    ++arm_sizes[arm];
    if (lattice.death(i, j)) {
      out.death_ids.push_back(lattice.subjects[i].id);
      ++out.deaths_total;
      ++out.deaths_by_arm[arm];
    }
  }
  const int m = lattice.size();
  out.risk_total = m == 0 ? 0.0 : static_cast<double>(out.deaths_total) / m;
  for (int z = 0; z < 2; ++z)
    out.risk_by_arm[z] = arm_sizes[z] == 0
                             ? 0.0
                             : static_cast<double>(out.deaths_by_arm[z]) / arm_sizes[z];
  return out;
}

bool MultiverseReport::all_bounds_hold() const {
  auto scope_ok = [](const ScopeSummary& s) { return s.lower_bound_ok && s.upper_bound_ok; };
  if (!scope_ok(pooled) || !scope_ok(by_arm[0]) || !scope_ok(by_arm[1])) return false;
  for (const TimeRow& row : per_time)
    for (int s = 0; s < 3; ++s)
      if (!row.actual_le_world[s] || !row.world_le_cum_actual[s]) return false;
  return true;
}

MultiverseReport multiverse_summary(const PotentialOutcomeLattice& lattice, double tau) {
  const std::size_t J = lattice.worlds();
  if (J == 0) throw ConfigError("lattice has no worlds");
  auto end = std::upper_bound(lattice.times.begin(), lattice.times.end(), tau);
  const auto worlds_used = static_cast<std::size_t>(end - lattice.times.begin());
  if (worlds_used == 0) throw ConfigError("tau precedes the first world time");

  MultiverseReport report;
  report.tau = tau;
  report.worlds_used = static_cast<int>(worlds_used);
  report.per_time.resize(J);

  std::array<int, 3> scope_sizes{lattice.size(), 0, 0};
  for (const LatticeSubject& subject : lattice.subjects)
    ++scope_sizes[1 + subject.arm];

  // per-time death counts; scope index 0 = pooled, 1 = arm0, 2 = arm1
  for (std::size_t j = 0; j < J; ++j) report.per_time[j].time = lattice.times[j];
  for (std::size_t i = 0; i < lattice.subjects.size(); ++i) {
    const int s = 1 + lattice.subjects[i].arm;
    if (lattice.subjects[i].death_index) {
      const std::size_t k = *lattice.subjects[i].death_index;
      ++report.per_time[k].actual_deaths[0];
      ++report.per_time[k].actual_deaths[s];
    }
    for (std::size_t j = 0; j < J; ++j) {
      if (lattice.death(i, j)) {
        ++report.per_time[j].world_deaths[0];
        ++report.per_time[j].world_deaths[s];
      }
    }
  }

  std::array<int, 3> cum_actual{0, 0, 0};
  for (std::size_t j = 0; j < J; ++j) {
    MultiverseReport::TimeRow& row = report.per_time[j];
    for (int s = 0; s < 3; ++s) {
      cum_actual[s] += row.actual_deaths[s];
      row.actual_le_world[s] = row.actual_deaths[s] <= row.world_deaths[s];
      row.world_le_cum_actual[s] = row.world_deaths[s] <= cum_actual[s];
    }
  }

  auto fill_scope = [&](int s) {
    ScopeSummary summary;
    summary.size = scope_sizes[s];
    std::int64_t world_total = 0;
    std::int64_t actual_total = 0;
    for (std::size_t j = 0; j < worlds_used; ++j) {
      world_total += report.per_time[j].world_deaths[s];
      actual_total += report.per_time[j].actual_deaths[s];
    }
    if (summary.size > 0) {
      const auto size = static_cast<double>(summary.size);
      // identical division shapes keep the J == 1 and no-re-death equality
      // cases exact in floating point
      for (std::size_t j = 0; j < worlds_used; ++j) {
        summary.cumulative += report.per_time[j].world_deaths[s] / size;
        summary.actual_risk += report.per_time[j].actual_deaths[s] / size;
      }
    }
    summary.average = summary.cumulative / static_cast<double>(worlds_used);
    // the bounds are statements about death counts, so compare the counts:
    // the rounded double summaries can sit an ulp past the equality point
    summary.lower_bound_ok =
        world_total <= static_cast<std::int64_t>(worlds_used) * actual_total;
    summary.upper_bound_ok = actual_total <= world_total;
    return summary;
  };
  report.pooled = fill_scope(0);
  report.by_arm[0] = fill_scope(1);
  report.by_arm[1] = fill_scope(2);
  return report;
}

BoundsCheck verify_bounds(const PotentialOutcomeLattice& lattice, double tau) {
  BoundsCheck check;
  check.violations = validate_lattice(lattice);
  check.report = multiverse_summary(lattice, tau);

  static constexpr const char* kScopeNames[3] = {"pooled", "arm0", "arm1"};
  auto scope_failures = [&](const ScopeSummary& summary, const char* name) {
    if (!summary.lower_bound_ok) {
      std::ostringstream msg;
      msg << name << ": average " << summary.average << " > actual risk "
          << summary.actual_risk;
      check.failures.push_back(msg.str());
    }
    if (!summary.upper_bound_ok) {
      std::ostringstream msg;
      msg << name << ": actual risk " << summary.actual_risk << " > cumulative "
          << summary.cumulative;
      check.failures.push_back(msg.str());
    }
  };
  scope_failures(check.report.pooled, kScopeNames[0]);
  scope_failures(check.report.by_arm[0], kScopeNames[1]);
  scope_failures(check.report.by_arm[1], kScopeNames[2]);

  for (const MultiverseReport::TimeRow& row : check.report.per_time) {
    for (int s = 0; s < 3; ++s) {
      if (!row.actual_le_world[s]) {
        std::ostringstream msg;
        msg << kScopeNames[s] << " at t=" << row.time << ": actual deaths "
            << row.actual_deaths[s] << " exceed world deaths " << row.world_deaths[s];
        check.failures.push_back(msg.str());
      }
      if (!row.world_le_cum_actual[s]) {
        std::ostringstream msg;
        msg << kScopeNames[s] << " at t=" << row.time << ": world deaths "
            << row.world_deaths[s] << " exceed accumulated actual deaths";
        check.failures.push_back(msg.str());
      }
    }
  }

  check.pass = check.violations.empty() && check.failures.empty();
  return check;
}

Cohort actual_cohort(const PotentialOutcomeLattice& lattice) {
  std::vector<SubjectRecord> records;
  records.reserve(lattice.subjects.size());
  for (const LatticeSubject& subject : lattice.subjects) {
    SubjectRecord rec;
    rec.id = subject.id;
    rec.arm = subject.arm;
    rec.stratum = subject.stratum;
    if (subject.death_index) {
      rec.followup_time = lattice.times[*subject.death_index];
      rec.event = true;
    } else {
      rec.followup_time = lattice.times.back();
      rec.event = false;
    }
    records.push_back(rec);
  }
  return make_cohort(std::move(records), lattice.strata);
}

OracleComparison estimator_oracle_check(const PotentialOutcomeLattice& lattice,
                                        double tolerance) {
  const Cohort cohort = actual_cohort(lattice);
  const RiskTable table = build_risk_table(cohort);
  const HazardCurve icp[2] = {icp_hazard(table, 0), icp_hazard(table, 1)};

  auto increment_at = [&](int arm, double time) {
    const auto& times = icp[arm].times;
    auto it = std::lower_bound(times.begin(), times.end(), time);
    if (it == times.end() || *it != time) return 0.0;
    return icp[arm].increments[static_cast<std::size_t>(it - times.begin())];
  };

  OracleComparison comparison;
  comparison.tolerance = tolerance;
  for (std::size_t j = 0; j < lattice.worlds(); ++j) {
    const PossibleWorld w = world(lattice, j);
    for (int z = 0; z < 2; ++z) {
      OracleComparison::Entry entry;
      entry.time = w.time;
      entry.arm = z;
      entry.world_risk = w.risk_by_arm[z];
      entry.estimator_increment = increment_at(z, w.time);
      comparison.entries.push_back(entry);
      comparison.max_abs_diff = std::max(
          comparison.max_abs_diff, std::abs(entry.world_risk - entry.estimator_increment));
    }
  }
  comparison.within_tolerance = comparison.max_abs_diff <= tolerance;
  return comparison;
}

}  // namespace multihaz
