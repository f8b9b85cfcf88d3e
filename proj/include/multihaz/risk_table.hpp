#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multihaz/cohort.hpp"

namespace multihaz {

/// Per (event time, arm, stratum) event and at-risk counts — the sufficient
/// statistic consumed by every estimator.
///
/// Conventions: a subject with followup_time == t_j counts as at risk at
/// t_j (events and same-time censorings both sit inside the risk set), and
/// an event at t_j is counted at t_j. Immutable after construction.
class RiskTable {
 public:
  RiskTable(std::vector<double> times, std::vector<std::string> strata,
            std::vector<int> events, std::vector<int> at_risk,
            std::vector<int> stratum_sizes, int total);

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::string>& strata() const { return strata_; }
  std::size_t time_count() const { return times_.size(); }
  std::size_t strata_count() const { return strata_.size(); }

  /// d(t_j, z, x): events at exactly t_j in arm z, stratum x.
  int events(std::size_t j, int arm, std::size_t x) const {
    return events_[cell(j, arm, x)];
  }
  /// r(t_j, z, x): subjects with followup_time >= t_j in arm z, stratum x.
  int at_risk(std::size_t j, int arm, std::size_t x) const {
    return at_risk_[cell(j, arm, x)];
  }
  /// m_x: subjects in stratum x, both arms.
  int stratum_size(std::size_t x) const { return stratum_sizes_[x]; }
  /// m: total sample size.
  int total_size() const { return total_; }

  std::optional<std::size_t> stratum_index(const std::string& label) const;

 private:
  std::size_t cell(std::size_t j, int arm, std::size_t x) const {
    return (j * 2 + static_cast<std::size_t>(arm)) * strata_.size() + x;
  }

  std::vector<double> times_;
  std::vector<std::string> strata_;
  std::vector<int> events_;
  std::vector<int> at_risk_;
  std::vector<int> stratum_sizes_;
  int total_ = 0;
};

/// Aggregates a cohort into its risk table. Every (t_j, z, x) cell is
/// populated, including zero cells. Order independent: shuffled copies of
/// the same records produce identical tables.
RiskTable build_risk_table(const Cohort& cohort);

}  // namespace multihaz
