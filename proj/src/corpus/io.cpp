// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/corpus/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "safecomb/error.hpp"

namespace safecomb::corpus {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 10> kColumns{"id",     "account_id", "followers", "likes",
                                                    "comments", "shares",   "source",    "appeal",
                                                    "frame",    "evidence"};

// Thrown while converting a single row; never escapes the reader.
struct RowError {
  std::string reason;
};

// Labels as read, before validation.
struct RawLabels {
  std::vector<std::string> source, appeal, frame, evidence;
};

std::uint64_t parse_count(std::string_view field, std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw RowError{"field '" + std::string(field) + "' is not a non-negative integer"};
  return value;
}

std::uint64_t json_count(const json& row, const char* field) {
  if (!row.contains(field)) throw RowError{std::string("missing field '") + field + "'"};
  const json& v = row.at(field);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw RowError{std::string("field '") + field + "' is negative"};
    return v.get<std::uint64_t>();
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0 && d == static_cast<double>(static_cast<std::uint64_t>(d)))
      return static_cast<std::uint64_t>(d);
  }
  throw RowError{std::string("field '") + field + "' is not a non-negative integer"};
}

std::string json_string(const json& row, const char* field) {
  if (!row.contains(field)) throw RowError{std::string("missing field '") + field + "'"};
  const json& v = row.at(field);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  throw RowError{std::string("field '") + field + "' is not a string"};
}

std::vector<std::string> json_codes(const json& row, const char* field) {
  if (!row.contains(field)) throw RowError{std::string("missing field '") + field + "'"};
  const json& v = row.at(field);
  if (v.is_string()) return {v.get<std::string>()};
  if (v.is_null()) return {};
  if (!v.is_array()) throw RowError{std::string("field '") + field + "' is not an array of codes"};
  std::vector<std::string> out;
  for (const json& item : v) {
    if (!item.is_string()) throw RowError{std::string("field '") + field + "' holds a non-string code"};
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<std::string> split_codes(std::string_view cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    const std::size_t bar = cell.find('|', start);
    auto piece = cell.substr(start, bar == std::string_view::npos ? cell.npos : bar - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    if (!piece.empty()) out.emplace_back(piece);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

// Validates one dimension's codes and folds them into `v`.
void add_dimension(FeatureVector& v, Dimension dim, const std::vector<std::string>& codes,
                   bool lenient, std::vector<std::string>& warnings) {
  const std::string dim_name(dimension_name(dim));
  FeatureVector block;
  for (const auto& text : codes) {
    const auto category = parse_category(text);
    if (!category) throw RowError{"unknown code '" + text + "' in " + dim_name};
    if (dimension_of(*category) != dim)
      throw RowError{"code '" + text + "' is not a " + dim_name + " category"};
    block.set(*category);
  }
  if (block.empty()) {
    if (!lenient) throw RowError{"empty dimension: " + dim_name};
    block.set(absence_marker(dim));
    warnings.push_back("empty dimension " + dim_name + " coerced to " +
                       std::string(code(absence_marker(dim))));
  }
  if (block.test(absence_marker(dim)) && block.count() > 1)
    throw RowError{"absence marker co-occurrence: " + dim_name};
  if (dim == Dimension::Frame && block.count() != 1)
    throw RowError{"frame must hold exactly one category"};
  v = v | block;
}

FeatureVector build_labels(const RawLabels& raw, bool lenient, std::vector<std::string>& warnings) {
  FeatureVector v;
  add_dimension(v, Dimension::Source, raw.source, lenient, warnings);
  add_dimension(v, Dimension::Appeal, raw.appeal, lenient, warnings);
  add_dimension(v, Dimension::Frame, raw.frame, lenient, warnings);
  add_dimension(v, Dimension::Evidence, raw.evidence, lenient, warnings);
  return v;
}

MessageRecord parse_json_row(const std::string& line, bool lenient, std::vector<std::string>& warnings,
                             std::string& id_out) {
  json row;
  try {
    row = json::parse(line);
  } catch (const json::parse_error& e) {
    throw RowError{std::string("malformed JSON: ") + e.what()};
  }
  if (!row.is_object()) throw RowError{"row is not a JSON object"};
  MessageRecord r;
  r.id = json_string(row, "id");
  id_out = r.id;
  r.account_id = json_string(row, "account_id");
  r.followers = json_count(row, "followers");
  r.likes = json_count(row, "likes");
  r.comments = json_count(row, "comments");
  r.shares = json_count(row, "shares");
  RawLabels raw{json_codes(row, "source"), json_codes(row, "appeal"), json_codes(row, "frame"),
                json_codes(row, "evidence")};
  r.labels = build_labels(raw, lenient, warnings);
  return r;
}

// Splits one CSV line; supports double-quoted cells with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) throw RowError{"unterminated quoted cell"};
  cells.push_back(std::move(cell));
  return cells;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_codes(const std::vector<Category>& cats) {
  std::string out;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    if (i) out.push_back('|');
    out += code(cats[i]);
  }
  return out;
}

json codes_json(const std::vector<Category>& cats) {
  json arr = json::array();
  for (Category c : cats) arr.push_back(std::string(code(c)));
  return arr;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "jsonl") return Format::Jsonl;
  if (name == "csv") return Format::Csv;
  throw UsageError("unknown input format '" + std::string(name) + "' (expected jsonl or csv)");
}

Format format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? Format::Csv : Format::Jsonl;
}

json ParseReport::to_json() const {
  auto issues = [](const std::vector<RowIssue>& list) {
    json arr = json::array();
    for (const auto& issue : list)
      arr.push_back({{"line", issue.line}, {"id", issue.id}, {"reason", issue.reason}});
    return arr;
  };
  return {{"source", source},
          {"accepted", accepted},
          {"rejected", rejected},
          {"rejections", issues(rejections)},
          {"warnings", issues(warnings)}};
}

Corpus read_corpus(std::istream& in, Format format, ReadOptions options, std::string source_name) {
  Corpus corpus;
  corpus.report.source = std::move(source_name);
  std::unordered_set<std::string> seen_ids;
  std::unordered_map<std::string, std::size_t> column_index;
  bool header_done = format == Format::Jsonl;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim_cr(line);
    if (blank(text)) continue;

    if (!header_done) {
      std::vector<std::string> header;
      try {
        header = split_csv_line(text);
      } catch (const RowError& e) {
        throw DataError(corpus.report.source + ": bad CSV header: " + e.reason);
      }
      for (std::size_t i = 0; i < header.size(); ++i) column_index[header[i]] = i;
      for (auto col : kColumns)
        if (!column_index.contains(std::string(col)))
          throw DataError(corpus.report.source + ": CSV header lacks column '" + std::string(col) + "'");
      header_done = true;
      continue;
    }

    std::vector<std::string> warnings;
    std::string id;
    try {
      MessageRecord record;
      if (format == Format::Jsonl) {
        record = parse_json_row(std::string(text), options.lenient, warnings, id);
      } else {
        const auto cells = split_csv_line(text);
        auto cell = [&](std::string_view col) -> const std::string& {
          const std::size_t idx = column_index.at(std::string(col));
          if (idx >= cells.size()) throw RowError{"row has too few columns"};
          return cells[idx];
        };
        record.id = cell("id");
        id = record.id;
        if (record.id.empty()) throw RowError{"field 'id' is empty"};
        record.account_id = cell("account_id");
        record.followers = parse_count("followers", cell("followers"));
        record.likes = parse_count("likes", cell("likes"));
        record.comments = parse_count("comments", cell("comments"));
        record.shares = parse_count("shares", cell("shares"));
        RawLabels raw{split_codes(cell("source")), split_codes(cell("appeal")),
                      split_codes(cell("frame")), split_codes(cell("evidence"))};
        record.labels = build_labels(raw, options.lenient, warnings);
      }
      if (record.id.empty()) throw RowError{"field 'id' is empty"};
      if (!seen_ids.insert(record.id).second) throw RowError{"duplicate id '" + record.id + "'"};
      for (auto& w : warnings) corpus.report.warnings.push_back({line_no, record.id, std::move(w)});
      corpus.records.push_back(std::move(record));
      ++corpus.report.accepted;
    } catch (const RowError& e) {
      corpus.report.rejections.push_back({line_no, id, e.reason});
      ++corpus.report.rejected;
    }
  }
  if (!header_done) throw DataError(corpus.report.source + ": CSV input has no header row");
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path, Format format, ReadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file '" + path.string() + "'");
  return read_corpus(in, format, options, path.string());
}

json record_to_json(const MessageRecord& r) {
  json row;
  row["id"] = r.id;
  row["account_id"] = r.account_id;
  row["followers"] = r.followers;
  row["likes"] = r.likes;
  row["comments"] = r.comments;
  row["shares"] = r.shares;
  row["source"] = codes_json(r.source());
  row["appeal"] = codes_json(r.appeal());
  row["frame"] = std::string(code(r.frame()));
  row["evidence"] = codes_json(r.evidence());
  return row;
}

void write_jsonl(std::ostream& out, const std::vector<MessageRecord>& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

void write_csv(std::ostream& out, const std::vector<MessageRecord>& records) {
  for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& r : records) {
    out << csv_escape(r.id) << ',' << csv_escape(r.account_id) << ',' << r.followers << ','
        << r.likes << ',' << r.comments << ',' << r.shares << ',' << join_codes(r.source()) << ','
        << join_codes(r.appeal()) << ',' << code(r.frame()) << ',' << join_codes(r.evidence())
        << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, Format format,
                  const std::vector<MessageRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  if (format == Format::Jsonl)
    write_jsonl(out, records);
  else
    write_csv(out, records);
}

}  // namespace safecomb::corpus
