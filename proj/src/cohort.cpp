#include "multihaz/cohort.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "csv_util.hpp"
#include "multihaz/errors.hpp"

namespace multihaz {

Cohort make_cohort(std::vector<SubjectRecord> records, std::vector<std::string> strata) {
  if (records.empty()) throw DataError("empty cohort");

  std::unordered_set<std::int64_t> seen_ids;
  seen_ids.reserve(records.size());
  for (const SubjectRecord& rec : records) {
    if (rec.id < 0) throw DataError("negative id " + std::to_string(rec.id));
    if (!seen_ids.insert(rec.id).second)
      throw DataError("duplicate id " + std::to_string(rec.id));
    if (rec.arm != 0 && rec.arm != 1)
      throw DataError("non-binary arm for id " + std::to_string(rec.id));
    if (!(rec.followup_time > 0.0))
      throw DataError("non-positive time for id " + std::to_string(rec.id));
    if (rec.stratum < 0 || static_cast<std::size_t>(rec.stratum) >= strata.size())
      throw DataError("stratum index out of range for id " + std::to_string(rec.id));
  }

  std::set<double> event_times;
  for (const SubjectRecord& rec : records)
    if (rec.event) event_times.insert(rec.followup_time);

  Cohort cohort;
  cohort.records = std::move(records);
  cohort.strata = std::move(strata);
  cohort.grid.assign(event_times.begin(), event_times.end());
  return cohort;
}

namespace {

struct RawRow {
  std::int64_t id;
  int arm;
  std::string stratum;
  double time;
  int event;
};

[[noreturn]] void row_error(const std::string& origin, std::size_t line_no,
                            const std::string& what) {
  throw DataError(origin + ": line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Cohort parse_cohort_csv(std::istream& in, const CsvSchema& schema,
                        const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  std::vector<std::string> header = csv::split_line(line);

  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError(origin + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t col_id = column(schema.id);
  const std::size_t col_arm = column(schema.arm);
  const std::size_t col_stratum = column(schema.stratum);
  const std::size_t col_time = column(schema.time);
  const std::size_t col_event = column(schema.event);

  std::vector<RawRow> rows;
  std::set<std::string> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = csv::split_line(line);
    if (fields.size() != header.size())
      row_error(origin, line_no, "expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(fields.size()));
    RawRow row;
    if (!csv::parse_int64(fields[col_id], row.id))
      row_error(origin, line_no, "unparseable id '" + fields[col_id] + "'");
    if (row.id < 0) row_error(origin, line_no, "negative id");
    if (!csv::parse_binary(fields[col_arm], row.arm))
      row_error(origin, line_no, "non-binary arm '" + fields[col_arm] + "'");
    if (!csv::parse_double(fields[col_time], row.time))
      row_error(origin, line_no, "unparseable time '" + fields[col_time] + "'");
    if (!(row.time > 0.0)) row_error(origin, line_no, "non-positive time");
    if (!csv::parse_binary(fields[col_event], row.event))
      row_error(origin, line_no, "non-binary event '" + fields[col_event] + "'");
    row.stratum = fields[col_stratum];
    if (row.stratum.empty()) row_error(origin, line_no, "empty stratum label");
    labels.insert(row.stratum);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(origin + ": empty cohort");

  std::vector<std::string> strata = csv::order_labels(labels);
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < strata.size(); ++i)
    index[strata[i]] = static_cast<int>(i);

  std::vector<SubjectRecord> records;
  records.reserve(rows.size());
  bool any_event = false;
  for (const RawRow& row : rows) {
    any_event = any_event || row.event == 1;
    records.push_back(SubjectRecord{row.id, row.arm, index.at(row.stratum), row.time,
                                    row.event == 1});
  }
  if (!any_event) throw DataError(origin + ": empty event grid (no rows with event=1)");

  return make_cohort(std::move(records), std::move(strata));
}

Cohort load_cohort(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cohort file: " + path);
  return parse_cohort_csv(in, schema, path);
}

}  // namespace multihaz
