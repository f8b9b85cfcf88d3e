#include "multihaz/risk_table.hpp"

#include <algorithm>

namespace multihaz {

RiskTable::RiskTable(std::vector<double> times, std::vector<std::string> strata,
                     std::vector<int> events, std::vector<int> at_risk,
                     std::vector<int> stratum_sizes, int total)
    : times_(std::move(times)),
      strata_(std::move(strata)),
      events_(std::move(events)),
      at_risk_(std::move(at_risk)),
      stratum_sizes_(std::move(stratum_sizes)),
      total_(total) {}

std::optional<std::size_t> RiskTable::stratum_index(const std::string& label) const {
  auto it = std::find(strata_.begin(), strata_.end(), label);
  if (it == strata_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - strata_.begin());
}

RiskTable build_risk_table(const Cohort& cohort) {
  const std::vector<double>& grid = cohort.grid;
  const std::size_t J = grid.size();
  const std::size_t K = cohort.strata.size();
  const std::size_t cells = J * 2 * K;

  std::vector<int> events(cells, 0);
  std::vector<int> last_risk(cells, 0); // count of records whose final grid time is t_j
  std::vector<int> stratum_sizes(K, 0);

  auto cell = [K](std::size_t j, int z, std::size_t x) {
    return (j * 2 + static_cast<std::size_t>(z)) * K + x;
  };

  for (const SubjectRecord& rec : cohort.records) {
    const auto x = static_cast<std::size_t>(rec.stratum);
    ++stratum_sizes[x];
    // last grid index with t_j <= followup_time; nothing if t_1 > followup
    auto it = std::upper_bound(grid.begin(), grid.end(), rec.followup_time);
    if (it == grid.begin()) continue;
    const auto last = static_cast<std::size_t>(it - grid.begin()) - 1;
    ++last_risk[cell(last, rec.arm, x)];
    if (rec.event) {
      auto ev = std::lower_bound(grid.begin(), grid.end(), rec.followup_time);
      // event times are grid members by construction
      ++events[cell(static_cast<std::size_t>(ev - grid.begin()), rec.arm, x)];
    }
  }

  // r(t_j) = number of records at risk at t_j = suffix sums of last_risk
  std::vector<int> at_risk(cells, 0);
  for (int z = 0; z < 2; ++z) {
    for (std::size_t x = 0; x < K; ++x) {
      int suffix = 0;
      for (std::size_t j = J; j-- > 0;) {
        suffix += last_risk[cell(j, z, x)];
        at_risk[cell(j, z, x)] = suffix;
      }
    }
  }

  return RiskTable(grid, cohort.strata, std::move(events), std::move(at_risk),
                   std::move(stratum_sizes), cohort.size());
}

}  // namespace multihaz
