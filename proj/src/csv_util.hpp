#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace multihaz::csv {

inline std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline bool parse_int64(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !s.empty();
}

inline bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !s.empty();
}

/// Orders a distinct label set: numerically when every label parses as an
/// integer, lexicographically otherwise.
template <typename Set>
inline std::vector<std::string> order_labels(const Set& labels) {
  std::vector<std::string> out(labels.begin(), labels.end());
  std::vector<std::int64_t> numeric(out.size());
  bool all_numeric = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!parse_int64(out[i], numeric[i])) {
      all_numeric = false;
      break;
    }
  }
  if (all_numeric) {
    std::vector<std::size_t> idx(out.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return numeric[a] < numeric[b]; });
    std::vector<std::string> sorted;
    sorted.reserve(out.size());
    for (std::size_t i : idx) sorted.push_back(out[i]);
    return sorted;
  }
  return out;
}

/// Parses a strict binary field ("0" or "1").
inline bool parse_binary(std::string_view s, int& out) {
  if (s == "0") {
    out = 0;
    return true;
  }
  if (s == "1") {
    out = 1;
    return true;
  }
  return false;
}

}  // namespace multihaz::csv
