#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "relief/dataset.hpp"
#include "relief/selection.hpp"
#include "relief/simbench.hpp"

namespace relief {

struct LoadOptions {
  std::optional<char> delimiter;            // default: from extension
  std::optional<std::string> class_column;  // name or 0-based index; default "class", else last
  std::string missing_token = "NA";         // "?" and empty cells are always missing too
  std::size_t max_discrete_cardinality = 10;
  bool header = true;
  std::vector<std::string> force_discrete;
  std::vector<std::string> force_continuous;
};

enum class ScoreFormat { tsv, structured };

inline constexpr int kStructuredFormatVersion = 1;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline char delimiter_for(const std::string& path) {
  auto ends_with = [&](std::string_view ext) {
    if (path.size() < ext.size()) return false;
    std::string tail = path.substr(path.size() - ext.size());
    std::transform(tail.begin(), tail.end(), tail.begin(), [](unsigned char c) { return std::tolower(c); });
    return tail == ext;
  };
  if (ends_with(".csv")) return ',';
  return '\t';
}

}  // namespace detail

/// Parses delimited text into a Dataset. A column is continuous iff every
/// non-missing cell is numeric and it has more than max_discrete_cardinality
/// distinct values; explicit force lists override the inference.
inline Dataset parse_delimited(std::istream& in, const LoadOptions& opts, char delim) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line, delim);
    if (opts.header && header.empty()) {
      header = std::move(cells);
      continue;
    }
    rows.push_back(std::move(cells));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw DataError("no data rows");
  const std::size_t cols = header.empty() ? rows.front().size() : header.size();
  if (header.empty())
    for (std::size_t c = 0; c < cols; ++c) header.push_back(c + 1 == cols ? "class" : "A" + std::to_string(c + 1));
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != cols)
      throw DataError("ragged row at line " + std::to_string(line_numbers[r]) + ": " + std::to_string(rows[r].size()) +
                      " cells, expected " + std::to_string(cols));
  if (cols < 2) throw DataError("need at least one feature column and a class column");

  std::size_t class_col = cols - 1;
  if (opts.class_column) {
    const auto it = std::find(header.begin(), header.end(), *opts.class_column);
    if (it != header.end()) {
      class_col = static_cast<std::size_t>(it - header.begin());
    } else if (auto idx = detail::parse_number(*opts.class_column);
               idx && *idx >= 0 && *idx < static_cast<double>(cols) && *idx == static_cast<double>(static_cast<std::size_t>(*idx))) {
      class_col = static_cast<std::size_t>(*idx);
    } else {
      throw DataError("class column '" + *opts.class_column + "' not found");
    }
  } else if (const auto it = std::find(header.begin(), header.end(), "class"); it != header.end()) {
    class_col = static_cast<std::size_t>(it - header.begin());
  }

  auto is_missing = [&](const std::string& s) { return s.empty() || s == "?" || s == opts.missing_token; };
  auto listed = [&](const std::vector<std::string>& names, std::size_t c) {
    return std::find(names.begin(), names.end(), header[c]) != names.end() ||
           std::find(names.begin(), names.end(), std::to_string(c)) != names.end();
  };

  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (is_missing(rows[r][class_col]))
      throw DataError("missing class value at line " + std::to_string(line_numbers[r]));
    labels.push_back(rows[r][class_col]);
  }

  std::vector<FeatureDescriptor> descriptors;
  std::vector<std::vector<Cell>> cells(rows.size());
  for (std::size_t c = 0; c < cols; ++c) {
    if (c == class_col) continue;
    bool numeric = true;
    std::set<std::string> tokens;
    std::set<double> numbers;
    for (const auto& row : rows) {
      if (is_missing(row[c])) continue;
      tokens.insert(row[c]);
      if (auto v = detail::parse_number(row[c])) numbers.insert(*v);
      else numeric = false;
    }
    FeatureDescriptor desc;
    desc.name = header[c];
    const bool force_cont = listed(opts.force_continuous, c);
    const bool force_disc = listed(opts.force_discrete, c);
    if (force_cont && force_disc) throw DataError("column '" + desc.name + "' forced both discrete and continuous");
    if (force_cont && !numeric) throw DataError("column '" + desc.name + "' forced continuous but has non-numeric values");
    const bool continuous = force_cont || (!force_disc && numeric && numbers.size() > opts.max_discrete_cardinality);
    desc.kind = continuous ? FeatureKind::continuous : FeatureKind::discrete;
    std::map<std::string, double> codes;
    if (!numeric) {
      for (const auto& t : tokens) {
        codes.emplace(t, static_cast<double>(desc.levels.size()));
        desc.levels.push_back(t);
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& s = rows[r][c];
      if (is_missing(s)) cells[r].emplace_back();
      else cells[r].emplace_back(numeric ? *detail::parse_number(s) : codes.at(s));
    }
    descriptors.push_back(std::move(desc));
  }
  return build_dataset(cells, std::move(descriptors), labels);
}

inline Dataset load_delimited(const std::string& path, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_delimited(in, opts, opts.delimiter.value_or(detail::delimiter_for(path)));
}

/// Writes a dataset with a header row and a trailing "class" column.
inline void write_dataset(const Dataset& d, std::ostream& out, char delim = '\t', const std::string& missing = "NA") {
  for (std::size_t f = 0; f < d.features(); ++f) out << d.feature(f).name << delim;
  out << "class\n";
  for (std::size_t i = 0; i < d.instances(); ++i) {
    for (std::size_t f = 0; f < d.features(); ++f) {
      const auto& desc = d.feature(f);
      if (d.missing(i, f)) out << missing;
      else if (!desc.levels.empty()) out << desc.levels.at(static_cast<std::size_t>(d.value(i, f)));
      else out << detail::format_number(d.value(i, f));
      out << delim;
    }
    out << d.class_names()[d.label(i)] << '\n';
  }
}

inline nlohmann::json to_json(const RankedList& r) {
  nlohmann::json j;
  j["format_version"] = kStructuredFormatVersion;
  j["algorithm"] = r.algorithm;
  j["params"] = r.params;
  if (auto it = r.params.find("seed"); it != r.params.end()) j["seed"] = std::stoull(it->second);
  j["iteration"] = r.iteration ? nlohmann::json(*r.iteration) : nlohmann::json(nullptr);
  auto& entries = j["entries"] = nlohmann::json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"index", e.index}, {"feature", e.name}, {"score", e.score}, {"rank", e.rank}, {"tier", e.tier}});
  return j;
}

/// TSV: "feature\tscore\trank" then rows in rank order, 6-decimal scores
/// ("NA" for features not scored in the final round). Structured: versioned
/// JSON carrying metadata and full-precision scores.
inline void write_scores(const RankedList& r, ScoreFormat format, std::ostream& out) {
  if (format == ScoreFormat::structured) {
    out << to_json(r).dump(2) << '\n';
    return;
  }
  out << "feature\tscore\trank\n";
  char buf[64];
  for (const auto& e : r.entries) {
    out << e.name << '\t';
    if (e.tier == 0) {
      std::snprintf(buf, sizeof buf, "%.6f", e.score);
      out << buf;
    } else {
      out << "NA";
    }
    out << '\t' << e.rank << '\n';
  }
}

inline RankedList ranked_list_from_json(const nlohmann::json& j) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != kStructuredFormatVersion)
    throw DataError("unsupported structured score format version");
  RankedList r;
  r.algorithm = j.at("algorithm").get<std::string>();
  r.params = j.at("params").get<std::map<std::string, std::string>>();
  if (!j.at("iteration").is_null()) r.iteration = j["iteration"].get<int>();
  for (const auto& e : j.at("entries"))
    r.entries.push_back({e.at("index").get<std::size_t>(), e.at("feature").get<std::string>(),
                         e.at("score").get<double>(), e.at("rank").get<std::size_t>(), e.at("tier").get<int>()});
  return r;
}

/// Reads either score format (structured files start with '{'). TSV entries
/// get their row position as feature index.
inline RankedList read_scores(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return ranked_list_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed structured score file: ") + e.what());
    }
  }
  RankedList r;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line, '\t');
    if (!header_seen) {
      if (cells != std::vector<std::string>{"feature", "score", "rank"})
        throw DataError("score file header must be 'feature\\tscore\\trank'");
      header_seen = true;
      continue;
    }
    if (cells.size() != 3) throw DataError("malformed score row at line " + std::to_string(line_no));
    RankedEntry e;
    e.index = r.entries.size();
    e.name = cells[0];
    const auto rank = detail::parse_number(cells[2]);
    if (!rank || *rank < 1) throw DataError("bad rank at line " + std::to_string(line_no));
    e.rank = static_cast<std::size_t>(*rank);
    if (cells[1] == "NA") {
      e.tier = 1;
    } else if (auto v = detail::parse_number(cells[1])) {
      e.score = *v;
    } else {
      throw DataError("bad score at line " + std::to_string(line_no));
    }
    r.entries.push_back(std::move(e));
  }
  if (!header_seen) throw DataError("empty score file");
  return r;
}

/// TSV columns: model, algorithm, replicates, success_rate. Structured adds
/// success counts, criteria and diagnostics.
inline void write_power_report(const PowerReport& report, ScoreFormat format, std::ostream& out) {
  if (format == ScoreFormat::structured) {
    nlohmann::json j;
    j["format_version"] = kStructuredFormatVersion;
    auto& rows = j["rows"] = nlohmann::json::array();
    for (const auto& r : report.rows)
      rows.push_back({{"model", r.model},
                      {"algorithm", r.algorithm},
                      {"replicates", r.replicates},
                      {"success_count", r.success_count},
                      {"success_rate", r.success_rate},
                      {"criterion", r.criterion},
                      {"diagnostics", r.diagnostics}});
    out << j.dump(2) << '\n';
    return;
  }
  out << "model\talgorithm\treplicates\tsuccess_rate\n";
  char buf[64];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.success_rate);
    out << r.model << '\t' << r.algorithm << '\t' << r.replicates << '\t' << buf << '\n';
  }
}

}  // namespace relief
