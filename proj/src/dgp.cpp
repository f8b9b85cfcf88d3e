#include "multihaz/dgp.hpp"

#include <cmath>

#include "multihaz/errors.hpp"
#include "multihaz/rng.hpp"

namespace multihaz {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0 && std::isfinite(p); }

double effective_hazard(const DGPConfig& config, std::size_t j, int z, std::size_t x,
                        bool frail) {
  double h = config.hazard(j, z, x);
  if (frail) h *= config.frailty->hazard_multiplier;
  return h;
}

}  // namespace

void validate_config(const DGPConfig& config) {
  if (config.m < 1) throw ConfigError("m must be at least 1");
  if (config.times.empty()) throw ConfigError("times must be non-empty");
  if (!(config.times.front() > 0.0)) throw ConfigError("times must be positive");
  for (std::size_t j = 1; j < config.times.size(); ++j)
    if (!(config.times[j] > config.times[j - 1]))
      throw ConfigError("times must be strictly increasing");
  if (config.strata.empty()) throw ConfigError("strata must be non-empty");
  if (config.strata_probs.size() != config.strata.size())
    throw ConfigError("strata_probs must match strata");
  double total = 0.0;
  for (double p : config.strata_probs) {
    if (!is_probability(p)) throw ConfigError("stratum probability outside [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("strata_probs must sum to 1");

  if (config.assignment.kind == AssignmentConfig::Kind::randomized) {
    if (!is_probability(config.assignment.p))
      throw ConfigError("assignment probability outside [0,1]");
  } else {
    if (config.assignment.p_by_stratum.size() != config.strata.size())
      throw ConfigError("p_by_stratum must match strata");
    for (double p : config.assignment.p_by_stratum)
      if (!is_probability(p))
        throw ConfigError("assignment probability outside [0,1]");
  }

  const std::size_t J = config.times.size();
  const std::size_t K = config.strata.size();
  if (config.hazards.size() != J * 2 * K)
    throw ConfigError("hazard table must cover every (time, arm, stratum) cell");
  if (config.frailty) {
    if (!is_probability(config.frailty->prevalence))
      throw ConfigError("frailty prevalence outside [0,1]");
    if (!(config.frailty->hazard_multiplier >= 0.0) ||
        !std::isfinite(config.frailty->hazard_multiplier))
      throw ConfigError("frailty multiplier must be non-negative");
  }
  for (std::size_t x = 0; x < K; ++x) {
    for (int z = 0; z < 2; ++z) {
      for (std::size_t j = 0; j < J; ++j) {
        const double base = config.hazard(j, z, x);
        if (!is_probability(base))
          throw ConfigError("hazard outside [0,1] at (time " + std::to_string(j + 1) +
                            ", arm " + std::to_string(z) + ", stratum " +
                            config.strata[x] + ")");
        if (config.frailty && !is_probability(effective_hazard(config, j, z, x, true)))
          throw ConfigError("effective hazard outside [0,1] at (time " +
                            std::to_string(j + 1) + ", arm " + std::to_string(z) +
                            ", stratum " + config.strata[x] + ") under frailty");
      }
    }
  }
  if (!config.censoring.empty()) {
    if (config.censoring.size() != J)
      throw ConfigError("censoring must have one probability per time");
    for (double c : config.censoring)
      if (!is_probability(c)) throw ConfigError("censoring probability outside [0,1]");
  }
}

PotentialOutcomeLattice generate_lattice(const DGPConfig& config) {
  validate_config(config);
  const std::size_t J = config.times.size();
  const auto m = static_cast<std::size_t>(config.m);

  PotentialOutcomeLattice lattice;
  lattice.times = config.times;
  lattice.strata = config.strata;
  lattice.subjects.resize(m);
  lattice.deaths.assign(m * J, 0);

  for (std::size_t i = 0; i < m; ++i) {
    std::size_t x = 0;
    {
      const double u = keyed_uniform(config.seed, i, 0, Draw::stratum);
      double cum = 0.0;
      for (std::size_t s = 0; s < config.strata_probs.size(); ++s) {
        cum += config.strata_probs[s];
        if (u < cum || s + 1 == config.strata_probs.size()) {
          x = s;
          break;
        }
      }
    }
    const bool frail =
        config.frailty &&
        keyed_uniform(config.seed, i, 0, Draw::frailty) < config.frailty->prevalence;
    const double p_treat = config.assignment.kind == AssignmentConfig::Kind::randomized
                               ? config.assignment.p
                               : config.assignment.p_by_stratum[x];
    const int z = keyed_uniform(config.seed, i, 0, Draw::assignment) < p_treat ? 1 : 0;

    LatticeSubject& subject = lattice.subjects[i];
    subject.id = static_cast<std::int64_t>(i);
    subject.arm = z;
    subject.stratum = static_cast<int>(x);

    for (std::size_t j = 0; j < J; ++j) {
      const double h = effective_hazard(config, j, z, x, frail);
      if (keyed_uniform(config.seed, i, j, Draw::event) < h) {
        subject.death_index = j;
        break;
      }
    }

    if (subject.death_index) {
      const std::size_t k = *subject.death_index;
      lattice.deaths[i * J + k] = 1;
      for (std::size_t j = k + 1; j < J; ++j) {
        const double h = effective_hazard(config, j, z, x, frail);
        if (keyed_uniform(config.seed, i, j, Draw::redeath) < h)
          lattice.deaths[i * J + j] = 1;
      }
    }
  }
  return lattice;
}

Cohort observe(const PotentialOutcomeLattice& lattice, const DGPConfig& config) {
  if (lattice.times.size() != config.times.size())
    throw ConfigError("lattice and config disagree on the time grid");
  const std::size_t J = lattice.times.size();
  const bool censor = !config.censoring.empty();

  std::vector<SubjectRecord> records;
  records.reserve(lattice.subjects.size());
  for (std::size_t i = 0; i < lattice.subjects.size(); ++i) {
    const LatticeSubject& subject = lattice.subjects[i];
    SubjectRecord rec;
    rec.id = subject.id;
    rec.arm = subject.arm;
    rec.stratum = subject.stratum;
    rec.followup_time = lattice.times.back();
    rec.event = false;
    for (std::size_t j = 0; j < J; ++j) {
      if (subject.death_index && *subject.death_index == j) {
        // a death at t_j takes precedence over a censoring draw at t_j
        rec.followup_time = lattice.times[j];
        rec.event = true;
        break;
      }
      if (censor &&
          keyed_uniform(config.seed, i, j, Draw::censor) < config.censoring[j]) {
        rec.followup_time = lattice.times[j];
        rec.event = false;
        break;
      }
    }
    records.push_back(rec);
  }
  return make_cohort(std::move(records), lattice.strata);
}

namespace {

DGPConfig base_config(int m, std::size_t J, std::vector<std::string> strata,
                      std::vector<double> probs, std::uint64_t seed) {
  DGPConfig config;
  config.m = m;
  config.times.resize(J);
  for (std::size_t j = 0; j < J; ++j) config.times[j] = static_cast<double>(j + 1);
  config.strata = std::move(strata);
  config.strata_probs = std::move(probs);
  config.hazards.assign(J * 2 * config.strata.size(), 0.0);
  config.seed = seed;
  return config;
}

void fill_constant_hazard(DGPConfig& config, std::size_t x, double arm0, double arm1) {
  for (std::size_t j = 0; j < config.times.size(); ++j) {
    config.hazard(j, 0, x) = arm0;
    config.hazard(j, 1, x) = arm1;
  }
}

void apply_overrides(DGPConfig& config, const PresetOverrides& overrides) {
  if (overrides.m) config.m = *overrides.m;
  if (overrides.seed) config.seed = *overrides.seed;
}

}  // namespace

DGPConfig scenario_selection_bias(const PresetOverrides& overrides) {
  DGPConfig config = base_config(50000, 5, {"all"}, {1.0}, 1);
  fill_constant_hazard(config, 0, 0.2, 0.1);
  config.frailty = FrailtyConfig{0.5, 3.0}; // frail class: 0.6 vs 0.3
  apply_overrides(config, overrides);
  return config;
}

DGPConfig scenario_noncollapsible(const PresetOverrides& overrides) {
  DGPConfig config = base_config(50000, 5, {"lo", "hi"}, {0.5, 0.5}, 1);
  fill_constant_hazard(config, 0, 0.1, 0.08);
  fill_constant_hazard(config, 1, 0.5, 0.4);
  apply_overrides(config, overrides);
  return config;
}

DGPConfig scenario_default(const PresetOverrides& overrides) {
  DGPConfig config = base_config(2000, 5, {"a", "b"}, {0.5, 0.5}, 1);
  fill_constant_hazard(config, 0, 0.15, 0.1);
  fill_constant_hazard(config, 1, 0.3, 0.2);
  apply_overrides(config, overrides);
  return config;
}

std::vector<std::string> preset_names() {
  return {"default", "noncollapsible", "selection-bias"};
}

bool is_preset(const std::string& name) {
  for (const std::string& preset : preset_names())
    if (preset == name) return true;
  return false;
}

DGPConfig make_preset(const std::string& name, const PresetOverrides& overrides) {
  if (name == "default") return scenario_default(overrides);
  if (name == "noncollapsible") return scenario_noncollapsible(overrides);
  if (name == "selection-bias") return scenario_selection_bias(overrides);
  throw ConfigError("unknown preset '" + name + "'");
}

std::string preset_description(const std::string& name) {
  if (name == "default")
    return "randomized two-stratum design with mild hazard heterogeneity";
  if (name == "noncollapsible")
    return "strong stratum effect under balanced randomization; standardized "
           "(cct) and stratum-weighted (icp) hazards diverge over time";
  if (name == "selection-bias")
    return "latent frailty classes with beneficial treatment; marginal hazard "
           "ratio drifts toward 1 while per-class ratios stay constant";
  throw ConfigError("unknown preset '" + name + "'");
}

DGPConfig fold_frailty_into_strata(const DGPConfig& config) {
  if (!config.frailty) throw ConfigError("config has no frailty to fold");
  validate_config(config);

  const std::size_t J = config.times.size();
  const std::size_t K = config.strata.size();
  const double prevalence = config.frailty->prevalence;
  const double multiplier = config.frailty->hazard_multiplier;

  DGPConfig folded;
  folded.m = config.m;
  folded.times = config.times;
  folded.seed = config.seed;
  folded.censoring = config.censoring;
  folded.assignment = config.assignment;
  folded.assignment.p_by_stratum.clear();
  folded.hazards.assign(J * 2 * K * 2, 0.0);
  for (std::size_t x = 0; x < K; ++x) {
    folded.strata.push_back(config.strata[x] + "_robust");
    folded.strata.push_back(config.strata[x] + "_frail");
    folded.strata_probs.push_back(config.strata_probs[x] * (1.0 - prevalence));
    folded.strata_probs.push_back(config.strata_probs[x] * prevalence);
    if (config.assignment.kind == AssignmentConfig::Kind::confounded) {
      // frailty never influences assignment, so both classes inherit p_z|x
      folded.assignment.p_by_stratum.push_back(config.assignment.p_by_stratum[x]);
      folded.assignment.p_by_stratum.push_back(config.assignment.p_by_stratum[x]);
    }
    for (int z = 0; z < 2; ++z) {
      for (std::size_t j = 0; j < J; ++j) {
        folded.hazard(j, z, 2 * x) = config.hazard(j, z, x);
        folded.hazard(j, z, 2 * x + 1) = config.hazard(j, z, x) * multiplier;
      }
    }
  }
  validate_config(folded);
  return folded;
}

}  // namespace multihaz
