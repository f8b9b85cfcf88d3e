#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "multihaz/cohort.hpp"
#include "multihaz/risk_table.hpp"

namespace multihaz {

enum class HazardKind { marginal, cct, icp, conditional };

std::string_view to_string(HazardKind kind);

/// A (time, stratum) cell whose risk set was empty. Warnings are data, not
/// logs: they ride along with the curve and serialize with it.
struct RiskSetWarning {
  double time = 0.0;
  std::string stratum;
};

/// Per-time hazard increments for one arm and one estimand kind, on the
/// shared event-time grid.
struct HazardCurve {
  HazardKind kind = HazardKind::marginal;
  int arm = 0;
  std::string stratum; // set for conditional curves only
  std::vector<double> times;
  std::vector<double> increments; // each in [0, 1]
  std::vector<RiskSetWarning> warnings;
};

struct SummaryMeasures {
  double cumulative = 0.0; // sum of increments with t_j <= horizon
  double average = 0.0;    // cumulative / grid_points
  double horizon = 0.0;
  int grid_points = 0;     // number of grid times <= horizon
};

/// Pooled Nelson-Aalen increments: sum of events over sum of at-risk across
/// strata; 0 whenever the denominator is 0.
HazardCurve marginal_nelson_aalen(const RiskTable& table, int arm);

/// Standardized-population hazard: events and at-risk counts are each
/// weighted by the stratum size m_x and summed before the single division,
/// so the numerator and denominator are integrated separately.
/// 0 whenever the denominator is 0.
HazardCurve cct_hazard(const RiskTable& table, int arm);

/// Stratum-weighted average of conditional hazards:
/// sum over x of [d/r](t_j, z, x) * m_x / m. A cell with r == 0 contributes
/// 0 while retaining its weight (no renormalization) and is reported as a
/// warning, since identification locally fails there.
HazardCurve icp_hazard(const RiskTable& table, int arm);

/// Single-stratum hazard d/r; 0 with a warning when r == 0.
HazardCurve conditional_hazard(const RiskTable& table, int arm, std::size_t stratum_index);

/// Label-resolving overload; throws DataError on an unknown label.
HazardCurve conditional_hazard(const RiskTable& table, int arm, const std::string& stratum);

/// Cumulative and average summaries at horizon tau. The average divides by
/// the number of grid times <= tau (the shared grid, both arms).
/// Throws ConfigError when no grid time is <= tau.
SummaryMeasures summarize(const HazardCurve& curve, double tau);

/// Proportion of arm-z subjects with an observed event by tau. Defined only
/// for fully observed arms: throws DataError if any arm-z record is censored
/// before tau ("risk undefined under censoring").
double actual_risk(const Cohort& cohort, int arm, double tau);

/// Per-time differences between each marginal estimator and the m_x/m
/// weighted average of conditional hazards. icp_gap is identically zero by
/// construction; cct_gap measures non-collapsibility.
struct CollapsibilityGaps {
  std::vector<double> times;
  std::vector<double> cct_gap;
  std::vector<double> icp_gap;
};

/// Requires at least two strata (throws ConfigError otherwise).
CollapsibilityGaps collapsibility_gap(const RiskTable& table, int arm);

}  // namespace multihaz
