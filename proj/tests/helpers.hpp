#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "multihaz/cohort.hpp"
#include "multihaz/multiverse.hpp"
#include "multihaz/risk_table.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(MULTIHAZ_TEST_DATA_DIR) + "/" + name;
}

// Eight-subject reference cohort: two strata A/B of four subjects each,
// arm 1 holds one event at t=1 (stratum A) and one at t=2 (stratum B),
// everything else censored at t=3.
inline multihaz::Cohort e1_cohort() {
  using multihaz::SubjectRecord;
  std::vector<SubjectRecord> records{
      {1, 1, 0, 1.0, true},  {2, 1, 0, 3.0, false}, {3, 1, 1, 2.0, true},
      {4, 1, 1, 3.0, false}, {5, 0, 0, 3.0, false}, {6, 0, 0, 3.0, false},
      {7, 0, 1, 3.0, false}, {8, 0, 1, 3.0, false},
  };
  return multihaz::make_cohort(std::move(records), {"A", "B"});
}

// Three-subject lattice with k = [world 1, world 2, none] and one re-death.
inline multihaz::PotentialOutcomeLattice lattice3() {
  multihaz::PotentialOutcomeLattice lattice;
  lattice.times = {1.0, 2.0};
  lattice.strata = {"A"};
  lattice.subjects = {{1, 1, 0, std::size_t{0}}, {2, 0, 0, std::size_t{1}},
                      {3, 0, 0, std::nullopt}};
  lattice.deaths = {1, 1, 0, 1, 0, 0};
  return lattice;
}

/// Random cohort with censoring and event ties, guaranteed at least one
/// event. Times come from a small pool so ties across subjects are common.
inline multihaz::Cohort random_cohort(std::mt19937_64& rng, int max_m = 50,
                                      int max_strata = 4) {
  std::uniform_int_distribution<int> m_dist(2, max_m);
  std::uniform_int_distribution<int> k_dist(1, max_strata);
  const int m = m_dist(rng);
  const int strata_count = k_dist(rng);

  std::vector<std::string> labels;
  for (int x = 0; x < strata_count; ++x) labels.push_back("s" + std::to_string(x));

  const std::vector<double> time_pool{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
  std::uniform_int_distribution<std::size_t> time_dist(0, time_pool.size() - 1);
  std::bernoulli_distribution arm_dist(0.5);
  std::bernoulli_distribution event_dist(0.6);
  std::uniform_int_distribution<int> stratum_dist(0, strata_count - 1);

  std::vector<multihaz::SubjectRecord> records;
  for (int i = 0; i < m; ++i) {
    multihaz::SubjectRecord rec;
    rec.id = i;
    rec.arm = arm_dist(rng) ? 1 : 0;
    rec.stratum = stratum_dist(rng);
    rec.followup_time = time_pool[time_dist(rng)];
    rec.event = event_dist(rng);
    records.push_back(rec);
  }
  bool any_event = false;
  for (const auto& rec : records) any_event = any_event || rec.event;
  if (!any_event) records.front().event = true;
  return multihaz::make_cohort(std::move(records), std::move(labels));
}

/// Random valid lattice: arbitrary actual death worlds plus free re-death
/// entries; satisfies every coupling rule by construction.
inline multihaz::PotentialOutcomeLattice random_lattice(std::mt19937_64& rng, int m,
                                                        std::size_t worlds,
                                                        int strata_count = 2) {
  multihaz::PotentialOutcomeLattice lattice;
  lattice.times.resize(worlds);
  for (std::size_t j = 0; j < worlds; ++j) lattice.times[j] = static_cast<double>(j + 1);
  for (int x = 0; x < strata_count; ++x) lattice.strata.push_back("s" + std::to_string(x));
  lattice.deaths.assign(static_cast<std::size_t>(m) * worlds, 0);

  std::bernoulli_distribution arm_dist(0.5);
  std::uniform_int_distribution<int> stratum_dist(0, strata_count - 1);
  std::bernoulli_distribution dies_dist(0.7);
  std::uniform_int_distribution<std::size_t> world_dist(0, worlds - 1);
  std::bernoulli_distribution redeath_dist(0.4);

  for (int i = 0; i < m; ++i) {
    multihaz::LatticeSubject subject;
    subject.id = i;
    subject.arm = arm_dist(rng) ? 1 : 0;
    subject.stratum = stratum_dist(rng);
    if (dies_dist(rng)) {
      const std::size_t k = world_dist(rng);
      subject.death_index = k;
      lattice.deaths[static_cast<std::size_t>(i) * worlds + k] = 1;
      for (std::size_t j = k + 1; j < worlds; ++j)
        if (redeath_dist(rng))
          lattice.deaths[static_cast<std::size_t>(i) * worlds + j] = 1;
    }
    lattice.subjects.push_back(subject);
  }
  return lattice;
}

// --- naive per-record estimator oracles ---
//
// Direct evaluation of the defining formulas by enumeration over records;
// deliberately independent of RiskTable.

inline int naive_events(const multihaz::Cohort& cohort, double t, int z, int x) {
  int d = 0;
  for (const auto& rec : cohort.records)
    if (rec.event && rec.followup_time == t && rec.arm == z && rec.stratum == x) ++d;
  return d;
}

inline int naive_at_risk(const multihaz::Cohort& cohort, double t, int z, int x) {
  int r = 0;
  for (const auto& rec : cohort.records)
    if (rec.followup_time >= t && rec.arm == z && rec.stratum == x) ++r;
  return r;
}

inline int naive_stratum_size(const multihaz::Cohort& cohort, int x) {
  int n = 0;
  for (const auto& rec : cohort.records)
    if (rec.stratum == x) ++n;
  return n;
}

inline double naive_marginal(const multihaz::Cohort& cohort, double t, int z) {
  long long d = 0;
  long long r = 0;
  for (std::size_t x = 0; x < cohort.strata.size(); ++x) {
    d += naive_events(cohort, t, z, static_cast<int>(x));
    r += naive_at_risk(cohort, t, z, static_cast<int>(x));
  }
  return r == 0 ? 0.0 : static_cast<double>(d) / static_cast<double>(r);
}

inline double naive_cct(const multihaz::Cohort& cohort, double t, int z) {
  long long num = 0;
  long long den = 0;
  for (std::size_t x = 0; x < cohort.strata.size(); ++x) {
    const long long weight = naive_stratum_size(cohort, static_cast<int>(x));
    num += static_cast<long long>(naive_events(cohort, t, z, static_cast<int>(x))) * weight;
    den += static_cast<long long>(naive_at_risk(cohort, t, z, static_cast<int>(x))) * weight;
  }
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double naive_icp(const multihaz::Cohort& cohort, double t, int z) {
  double acc = 0.0;
  const auto m = static_cast<double>(cohort.records.size());
  for (std::size_t x = 0; x < cohort.strata.size(); ++x) {
    const int r = naive_at_risk(cohort, t, z, static_cast<int>(x));
    if (r == 0) continue;
    const int d = naive_events(cohort, t, z, static_cast<int>(x));
    acc += (static_cast<double>(d) / static_cast<double>(r)) *
           (naive_stratum_size(cohort, static_cast<int>(x)) / m);
  }
  return acc;
}

inline double naive_conditional(const multihaz::Cohort& cohort, double t, int z, int x) {
  const int r = naive_at_risk(cohort, t, z, x);
  if (r == 0) return 0.0;
  return static_cast<double>(naive_events(cohort, t, z, x)) / static_cast<double>(r);
}

}  // namespace testutil
