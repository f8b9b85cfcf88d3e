#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace multihaz {

/// One observed subject: follow-up time and event indicator share a common
/// time origin; event == false means the subject was right-censored at
/// followup_time.
struct SubjectRecord {
  std::int64_t id = 0;
  int arm = 0;                // treatment indicator, 0 or 1
  int stratum = 0;            // index into Cohort::strata
  double followup_time = 0.0; // strictly positive
  bool event = false;
};

/// Observed survival data plus the derived event-time grid.
///
/// The grid holds the distinct times at which at least one event occurred,
/// strictly ascending. Times are compared exactly as parsed; no binning.
/// Immutable after construction; safe to share across threads.
struct Cohort {
  std::vector<SubjectRecord> records;
  std::vector<std::string> strata; // ordered labels; records refer by index
  std::vector<double> grid;        // distinct event times, ascending

  int size() const { return static_cast<int>(records.size()); }
};

/// Validates records against the cohort invariants and derives the grid.
/// A cohort with zero events (empty grid) is permitted here; the CSV
/// loader rejects it.
///
/// Throws DataError on: empty record set, duplicate id, negative id,
/// non-binary arm, non-positive follow-up time, stratum index out of range.
Cohort make_cohort(std::vector<SubjectRecord> records, std::vector<std::string> strata);

/// Column-name mapping for cohort CSV input.
struct CsvSchema {
  std::string id = "id";
  std::string arm = "arm";
  std::string stratum = "stratum";
  std::string time = "time";
  std::string event = "event";
};

/// Reads a cohort from a headered CSV file. Stratum labels may be strings
/// or integers; the declared stratum set is the distinct labels, sorted
/// numerically when all labels are integers and lexicographically otherwise.
///
/// Throws IoError if the file cannot be opened, DataError on malformed
/// rows (with line number), duplicate ids, non-binary arm/event,
/// non-positive times, an empty cohort, or zero events.
Cohort load_cohort(const std::string& path, const CsvSchema& schema = {});

/// Same as load_cohort but from a stream; `origin` names the source in
/// error messages.
Cohort parse_cohort_csv(std::istream& in, const CsvSchema& schema, const std::string& origin);

}  // namespace multihaz
