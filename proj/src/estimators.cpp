#include "multihaz/estimators.hpp"

#include <algorithm>
#include <cstdint>

#include "multihaz/errors.hpp"

namespace multihaz {

std::string_view to_string(HazardKind kind) {
  switch (kind) {
    case HazardKind::marginal: return "marginal";
    case HazardKind::cct: return "cct";
    case HazardKind::icp: return "icp";
    case HazardKind::conditional: return "conditional";
  }
  return "unknown";
}

namespace {

void check_arm(int arm) {
  if (arm != 0 && arm != 1) throw ConfigError("arm must be 0 or 1");
}

}  // namespace

HazardCurve marginal_nelson_aalen(const RiskTable& table, int arm) {
  check_arm(arm);
  HazardCurve curve{HazardKind::marginal, arm, {}, table.times(), {}, {}};
  curve.increments.reserve(table.time_count());
  for (std::size_t j = 0; j < table.time_count(); ++j) {
    std::int64_t d = 0;
    std::int64_t r = 0;
    for (std::size_t x = 0; x < table.strata_count(); ++x) {
      d += table.events(j, arm, x);
      r += table.at_risk(j, arm, x);
    }
    curve.increments.push_back(r == 0 ? 0.0
                                      : static_cast<double>(d) / static_cast<double>(r));
  }
  return curve;
}

HazardCurve cct_hazard(const RiskTable& table, int arm) {
  check_arm(arm);
  HazardCurve curve{HazardKind::cct, arm, {}, table.times(), {}, {}};
  curve.increments.reserve(table.time_count());
  for (std::size_t j = 0; j < table.time_count(); ++j) {
    std::int64_t num = 0;
    std::int64_t den = 0;
    for (std::size_t x = 0; x < table.strata_count(); ++x) {
      const auto weight = static_cast<std::int64_t>(table.stratum_size(x));
      num += static_cast<std::int64_t>(table.events(j, arm, x)) * weight;
      den += static_cast<std::int64_t>(table.at_risk(j, arm, x)) * weight;
    }
    curve.increments.push_back(
        den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den));
  }
  return curve;
}

HazardCurve icp_hazard(const RiskTable& table, int arm) {
  check_arm(arm);
  HazardCurve curve{HazardKind::icp, arm, {}, table.times(), {}, {}};
  curve.increments.reserve(table.time_count());
  const auto m = static_cast<double>(table.total_size());
  for (std::size_t j = 0; j < table.time_count(); ++j) {
    double acc = 0.0;
    for (std::size_t x = 0; x < table.strata_count(); ++x) {
      const int r = table.at_risk(j, arm, x);
      if (r == 0) {
        // zero contribution, full weight retained; identification locally fails
        curve.warnings.push_back(RiskSetWarning{table.times()[j], table.strata()[x]});
        continue;
      }
      const double conditional =
          static_cast<double>(table.events(j, arm, x)) / static_cast<double>(r);
      acc += conditional * (static_cast<double>(table.stratum_size(x)) / m);
    }
    curve.increments.push_back(acc);
  }
  return curve;
}

HazardCurve conditional_hazard(const RiskTable& table, int arm, std::size_t stratum_index) {
  check_arm(arm);
  if (stratum_index >= table.strata_count())
    throw DataError("stratum index out of range");
  HazardCurve curve{HazardKind::conditional, arm, table.strata()[stratum_index],
                    table.times(), {}, {}};
  curve.increments.reserve(table.time_count());
  for (std::size_t j = 0; j < table.time_count(); ++j) {
    const int r = table.at_risk(j, arm, stratum_index);
    if (r == 0) {
      curve.warnings.push_back(
          RiskSetWarning{table.times()[j], table.strata()[stratum_index]});
      curve.increments.push_back(0.0);
      continue;
    }
    curve.increments.push_back(static_cast<double>(table.events(j, arm, stratum_index)) /
                               static_cast<double>(r));
  }
  return curve;
}

HazardCurve conditional_hazard(const RiskTable& table, int arm, const std::string& stratum) {
  auto index = table.stratum_index(stratum);
  if (!index) throw DataError("unknown stratum label '" + stratum + "'");
  return conditional_hazard(table, arm, *index);
}

SummaryMeasures summarize(const HazardCurve& curve, double tau) {
  auto end = std::upper_bound(curve.times.begin(), curve.times.end(), tau);
  const auto j_tau = static_cast<std::size_t>(end - curve.times.begin());
  if (j_tau == 0) throw ConfigError("tau precedes the first event time");
  double cumulative = 0.0;
  for (std::size_t j = 0; j < j_tau; ++j) cumulative += curve.increments[j];
  SummaryMeasures summary;
  summary.cumulative = cumulative;
  summary.average = cumulative / static_cast<double>(j_tau);
  summary.horizon = tau;
  summary.grid_points = static_cast<int>(j_tau);
  return summary;
}

double actual_risk(const Cohort& cohort, int arm, double tau) {
  check_arm(arm);
  int subjects = 0;
  int events = 0;
  for (const SubjectRecord& rec : cohort.records) {
    if (rec.arm != arm) continue;
    ++subjects;
    if (!rec.event && rec.followup_time < tau)
      throw DataError("risk undefined under censoring; use simulated truth");
    if (rec.event && rec.followup_time <= tau) ++events;
  }
  if (subjects == 0) throw DataError("no subjects in arm " + std::to_string(arm));
  return static_cast<double>(events) / static_cast<double>(subjects);
}

CollapsibilityGaps collapsibility_gap(const RiskTable& table, int arm) {
  check_arm(arm);
  if (table.strata_count() < 2)
    throw ConfigError("collapsibility gap requires at least two strata");

  const HazardCurve cct = cct_hazard(table, arm);
  const HazardCurve icp = icp_hazard(table, arm);
  const auto m = static_cast<double>(table.total_size());

  CollapsibilityGaps gaps;
  gaps.times = table.times();
  gaps.cct_gap.reserve(table.time_count());
  gaps.icp_gap.reserve(table.time_count());
  for (std::size_t j = 0; j < table.time_count(); ++j) {
    // same accumulation order as icp_hazard, so the icp gap is exactly zero
    double weighted = 0.0;
    for (std::size_t x = 0; x < table.strata_count(); ++x) {
      const int r = table.at_risk(j, arm, x);
      if (r == 0) continue;
      const double conditional =
          static_cast<double>(table.events(j, arm, x)) / static_cast<double>(r);
      weighted += conditional * (static_cast<double>(table.stratum_size(x)) / m);
    }
    gaps.cct_gap.push_back(cct.increments[j] - weighted);
    gaps.icp_gap.push_back(icp.increments[j] - weighted);
  }
  return gaps;
}

}  // namespace multihaz
