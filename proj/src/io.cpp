#include "multihaz/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "csv_util.hpp"
#include "multihaz/errors.hpp"

namespace multihaz {

std::string format_double(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void write_cohort_csv(const Cohort& cohort, std::ostream& out) {
  out << "id,arm,stratum,time,event\n";
  for (const SubjectRecord& rec : cohort.records) {
    out << rec.id << ',' << rec.arm << ','
        << cohort.strata[static_cast<std::size_t>(rec.stratum)] << ','
        << format_double(rec.followup_time) << ',' << (rec.event ? 1 : 0) << '\n';
  }
}

std::string cohort_csv(const Cohort& cohort) {
  std::ostringstream out;
  write_cohort_csv(cohort, out);
  return out.str();
}

void write_curve_csv(const HazardCurve& curve, std::ostream& out) {
  out << "time,increment,cumulative\n";
  double cumulative = 0.0;
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    cumulative += curve.increments[j];
    out << format_double(curve.times[j]) << ',' << format_double(curve.increments[j])
        << ',' << format_double(cumulative) << '\n';
  }
}

std::string curve_csv(const HazardCurve& curve) {
  std::ostringstream out;
  write_curve_csv(curve, out);
  return out.str();
}

void write_lattice_csv(const PotentialOutcomeLattice& lattice, std::ostream& out) {
  out << "id,arm,stratum,actual_death_index";
  for (std::size_t j = 0; j < lattice.worlds(); ++j) out << ",w" << (j + 1);
  out << '\n';
  for (std::size_t i = 0; i < lattice.subjects.size(); ++i) {
    const LatticeSubject& subject = lattice.subjects[i];
    out << subject.id << ',' << subject.arm << ','
        << lattice.strata[static_cast<std::size_t>(subject.stratum)] << ',';
    if (subject.death_index) out << (*subject.death_index + 1);
    for (std::size_t j = 0; j < lattice.worlds(); ++j)
      out << ',' << static_cast<int>(lattice.death(i, j));
    out << '\n';
  }
}

std::string lattice_csv(const PotentialOutcomeLattice& lattice) {
  std::ostringstream out;
  write_lattice_csv(lattice, out);
  return out.str();
}

PotentialOutcomeLattice parse_lattice_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  std::vector<std::string> header = csv::split_line(line);
  if (header.size() < 5 || header[0] != "id" || header[1] != "arm" ||
      header[2] != "stratum" || header[3] != "actual_death_index")
    throw DataError(origin + ": expected header id,arm,stratum,actual_death_index,w1..wJ");
  const std::size_t J = header.size() - 4;
  for (std::size_t j = 0; j < J; ++j)
    if (header[4 + j] != "w" + std::to_string(j + 1))
      throw DataError(origin + ": world columns must be named w1..wJ in order");

  struct RawSubject {
    std::int64_t id;
    int arm;
    std::string stratum;
    std::optional<std::size_t> death_index;
    std::vector<std::uint8_t> row;
  };
  std::vector<RawSubject> raw;
  std::set<std::string> labels;
  std::unordered_set<std::int64_t> seen_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = csv::split_line(line);
    if (fields.size() != header.size())
      throw DataError(origin + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields");
    RawSubject subject;
    if (!csv::parse_int64(fields[0], subject.id) || subject.id < 0)
      throw DataError(origin + ": line " + std::to_string(line_no) + ": bad id");
    if (!seen_ids.insert(subject.id).second)
      throw DataError(origin + ": line " + std::to_string(line_no) + ": duplicate id");
    if (!csv::parse_binary(fields[1], subject.arm))
      throw DataError(origin + ": line " + std::to_string(line_no) + ": non-binary arm");
    subject.stratum = fields[2];
    if (subject.stratum.empty())
      throw DataError(origin + ": line " + std::to_string(line_no) + ": empty stratum");
    labels.insert(subject.stratum);
    if (!fields[3].empty()) {
      std::int64_t k = 0;
      if (!csv::parse_int64(fields[3], k) || k < 1 || static_cast<std::size_t>(k) > J)
        throw DataError(origin + ": line " + std::to_string(line_no) +
                        ": actual_death_index must be empty or in 1.." + std::to_string(J));
      subject.death_index = static_cast<std::size_t>(k - 1);
    }
    subject.row.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
      int bit = 0;
      if (!csv::parse_binary(fields[4 + j], bit))
        throw DataError(origin + ": line " + std::to_string(line_no) +
                        ": world indicator must be 0 or 1");
      subject.row[j] = static_cast<std::uint8_t>(bit);
    }
    raw.push_back(std::move(subject));
  }
  if (raw.empty()) throw DataError(origin + ": no subjects");

  std::vector<std::string> strata = csv::order_labels(labels);
  std::unordered_map<std::string, int> index;
  for (std::size_t x = 0; x < strata.size(); ++x) index[strata[x]] = static_cast<int>(x);

  PotentialOutcomeLattice lattice;
  // the CSV format does not carry time values; world indices stand in
  lattice.times.resize(J);
  for (std::size_t j = 0; j < J; ++j) lattice.times[j] = static_cast<double>(j + 1);
  lattice.strata = std::move(strata);
  lattice.subjects.reserve(raw.size());
  lattice.deaths.reserve(raw.size() * J);
  for (const RawSubject& subject : raw) {
    lattice.subjects.push_back(LatticeSubject{subject.id, subject.arm,
                                              index.at(subject.stratum),
                                              subject.death_index});
    lattice.deaths.insert(lattice.deaths.end(), subject.row.begin(), subject.row.end());
  }
  return lattice;
}

PotentialOutcomeLattice load_lattice(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lattice file: " + path);
  PotentialOutcomeLattice lattice = parse_lattice_csv(in, path);
  const std::vector<LatticeViolation> violations = validate_lattice(lattice);
  if (!violations.empty()) {
    const LatticeViolation& first = violations.front();
    throw DataError(path + ": invariant violation at subject " +
                    std::to_string(first.subject) + ", world " +
                    std::to_string(first.world + 1) + ": " + first.what + " (" +
                    std::to_string(violations.size()) + " violation(s) total)");
  }
  return lattice;
}

nlohmann::json curve_to_json(const HazardCurve& curve) {
  nlohmann::json warnings = nlohmann::json::array();
  for (const RiskSetWarning& warning : curve.warnings)
    warnings.push_back({{"time", warning.time}, {"stratum", warning.stratum}});
  nlohmann::json j{{"kind", std::string(to_string(curve.kind))},
                   {"arm", curve.arm},
                   {"times", curve.times},
                   {"increments", curve.increments},
                   {"warnings", warnings}};
  if (curve.kind == HazardKind::conditional) j["stratum"] = curve.stratum;
  return j;
}

nlohmann::json summary_to_json(const SummaryMeasures& summary) {
  return {{"cumulative", summary.cumulative},
          {"average", summary.average},
          {"horizon", summary.horizon},
          {"grid_points", summary.grid_points}};
}

namespace {

nlohmann::json scope_to_json(const ScopeSummary& scope) {
  return {{"size", scope.size},
          {"cumulative", scope.cumulative},
          {"average", scope.average},
          {"actual_risk", scope.actual_risk},
          {"lower_bound_ok", scope.lower_bound_ok},
          {"upper_bound_ok", scope.upper_bound_ok}};
}

}  // namespace

nlohmann::json report_to_json(const MultiverseReport& report) {
  nlohmann::json per_time = nlohmann::json::array();
  for (const MultiverseReport::TimeRow& row : report.per_time) {
    per_time.push_back(
        {{"time", row.time},
         {"actual_deaths",
          {{"pooled", row.actual_deaths[0]},
           {"arm0", row.actual_deaths[1]},
           {"arm1", row.actual_deaths[2]}}},
         {"world_deaths",
          {{"pooled", row.world_deaths[0]},
           {"arm0", row.world_deaths[1]},
           {"arm1", row.world_deaths[2]}}},
         {"actual_le_world",
          {{"pooled", row.actual_le_world[0]},
           {"arm0", row.actual_le_world[1]},
           {"arm1", row.actual_le_world[2]}}},
         {"world_le_cum_actual",
          {{"pooled", row.world_le_cum_actual[0]},
           {"arm0", row.world_le_cum_actual[1]},
           {"arm1", row.world_le_cum_actual[2]}}}});
  }
  return {{"tau", report.tau},
          {"worlds_used", report.worlds_used},
          {"pooled", scope_to_json(report.pooled)},
          {"arm0", scope_to_json(report.by_arm[0])},
          {"arm1", scope_to_json(report.by_arm[1])},
          {"per_time", per_time},
          {"all_bounds_hold", report.all_bounds_hold()}};
}

nlohmann::json config_to_json(const DGPConfig& config) {
  nlohmann::json strata = nlohmann::json::array();
  const std::size_t J = config.times.size();
  for (std::size_t x = 0; x < config.strata.size(); ++x) {
    std::vector<double> arm0(J), arm1(J);
    for (std::size_t j = 0; j < J; ++j) {
      arm0[j] = config.hazard(j, 0, x);
      arm1[j] = config.hazard(j, 1, x);
    }
    strata.push_back({{"label", config.strata[x]},
                      {"prob", config.strata_probs[x]},
                      {"hazards", {{"arm0", arm0}, {"arm1", arm1}}}});
  }

  nlohmann::json assignment;
  if (config.assignment.kind == AssignmentConfig::Kind::randomized)
    assignment = {{"kind", "randomized"}, {"p", config.assignment.p}};
  else
    assignment = {{"kind", "confounded"},
                  {"p_by_stratum", config.assignment.p_by_stratum}};

  nlohmann::json j{{"m", config.m},
                   {"seed", config.seed},
                   {"times", config.times},
                   {"strata", strata},
                   {"assignment", assignment}};
  if (config.frailty)
    j["frailty"] = {{"prevalence", config.frailty->prevalence},
                    {"multiplier", config.frailty->hazard_multiplier}};
  if (!config.censoring.empty()) j["censoring"] = config.censoring;
  return j;
}

DGPConfig config_from_json(const nlohmann::json& j) {
  try {
    DGPConfig config;
    config.m = j.at("m").get<int>();
    config.seed = j.value("seed", std::uint64_t{0});
    config.times = j.at("times").get<std::vector<double>>();
    const nlohmann::json& strata = j.at("strata");
    if (!strata.is_array() || strata.empty())
      throw ConfigError("config field 'strata' must be a non-empty array");
    const std::size_t J = config.times.size();
    const std::size_t K = strata.size();
    config.hazards.assign(J * 2 * K, 0.0);
    for (std::size_t x = 0; x < K; ++x) {
      const nlohmann::json& entry = strata[x];
      config.strata.push_back(entry.at("label").get<std::string>());
      config.strata_probs.push_back(entry.at("prob").get<double>());
      const auto arm0 = entry.at("hazards").at("arm0").get<std::vector<double>>();
      const auto arm1 = entry.at("hazards").at("arm1").get<std::vector<double>>();
      if (arm0.size() != J || arm1.size() != J)
        throw ConfigError("hazards for stratum '" + config.strata.back() +
                          "' must list one value per time");
      for (std::size_t i = 0; i < J; ++i) {
        config.hazard(i, 0, x) = arm0[i];
        config.hazard(i, 1, x) = arm1[i];
      }
    }
    const nlohmann::json& assignment = j.at("assignment");
    const auto kind = assignment.at("kind").get<std::string>();
    if (kind == "randomized") {
      config.assignment.kind = AssignmentConfig::Kind::randomized;
      config.assignment.p = assignment.at("p").get<double>();
    } else if (kind == "confounded") {
      config.assignment.kind = AssignmentConfig::Kind::confounded;
      config.assignment.p_by_stratum =
          assignment.at("p_by_stratum").get<std::vector<double>>();
    } else {
      throw ConfigError("assignment kind must be 'randomized' or 'confounded'");
    }
    if (j.contains("frailty")) {
      FrailtyConfig frailty;
      frailty.prevalence = j.at("frailty").at("prevalence").get<double>();
      frailty.hazard_multiplier = j.at("frailty").at("multiplier").get<double>();
      config.frailty = frailty;
    }
    if (j.contains("censoring"))
      config.censoring = j.at("censoring").get<std::vector<double>>();
    validate_config(config);
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

DGPConfig load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  // a run manifest embeds the resolved config; accept it for exact replay
  if (j.is_object() && j.contains("command") && j.contains("config"))
    return config_from_json(j.at("config"));
  return config_from_json(j);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << contents;
  if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace multihaz
