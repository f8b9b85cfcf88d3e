#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "multihaz/cohort.hpp"
#include "multihaz/dgp.hpp"
#include "multihaz/estimators.hpp"
#include "multihaz/multiverse.hpp"

namespace multihaz {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// --- cohort CSV (columns id, arm, stratum, time, event) ---
void write_cohort_csv(const Cohort& cohort, std::ostream& out);
std::string cohort_csv(const Cohort& cohort);

// --- hazard curve CSV (columns time, increment, cumulative) ---
void write_curve_csv(const HazardCurve& curve, std::ostream& out);
std::string curve_csv(const HazardCurve& curve);

// --- lattice CSV (columns id, arm, stratum, actual_death_index, w1..wJ) ---
//
// The format carries world indicators only; on load the time grid is the
// world indices 1..J. actual_death_index is 1-based, empty for subjects
// who never die.
void write_lattice_csv(const PotentialOutcomeLattice& lattice, std::ostream& out);
std::string lattice_csv(const PotentialOutcomeLattice& lattice);
PotentialOutcomeLattice parse_lattice_csv(std::istream& in, const std::string& origin);

/// Loads and validates; invariant violations raise DataError naming the
/// offending (subject, world) cell.
PotentialOutcomeLattice load_lattice(const std::string& path);

// --- JSON forms ---
nlohmann::json curve_to_json(const HazardCurve& curve);
nlohmann::json summary_to_json(const SummaryMeasures& summary);
nlohmann::json report_to_json(const MultiverseReport& report);
nlohmann::json config_to_json(const DGPConfig& config);
DGPConfig config_from_json(const nlohmann::json& j);

/// Reads a DGP config from a JSON file. Accepts either a bare config or a
/// run manifest (the embedded "config" object is used), so a manifest can
/// replay its run directly.
DGPConfig load_config(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace multihaz
