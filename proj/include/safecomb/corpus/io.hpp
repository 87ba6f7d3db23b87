// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safecomb/corpus/record.hpp"

namespace safecomb::corpus {

enum class Format { Jsonl, Csv };

/// Throws UsageError for names other than "jsonl" and "csv".
Format parse_format(std::string_view name);
/// Guess from the file extension; ".csv" is CSV, everything else JSONL.
Format format_from_path(const std::filesystem::path& path);

struct ReadOptions {
  /// Empty dimensions get their absence marker (with a warning) instead of
  /// rejecting the row.
  bool lenient = false;
};

struct RowIssue {
  std::size_t line = 0;  ///< 1-based physical line in the input file
  std::string id;        ///< record id when it could be read
  std::string reason;
};

struct ParseReport {
  std::string source;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<RowIssue> rejections;
  std::vector<RowIssue> warnings;

  nlohmann::json to_json() const;
};

struct Corpus {
  std::vector<MessageRecord> records;
  ParseReport report;
};

/// Reads a corpus. Bad rows are rejected and listed in the report; only an
/// unreadable file or a CSV without the required header throws (DataError).
Corpus read_corpus(const std::filesystem::path& path, Format format, ReadOptions options = {});
Corpus read_corpus(std::istream& in, Format format, ReadOptions options = {},
                   std::string source_name = "<stream>");

void write_jsonl(std::ostream& out, const std::vector<MessageRecord>& records);
void write_csv(std::ostream& out, const std::vector<MessageRecord>& records);
void write_corpus(const std::filesystem::path& path, Format format,
                  const std::vector<MessageRecord>& records);

/// JSON object in the JSONL input schema.
nlohmann::json record_to_json(const MessageRecord& record);

}  // namespace safecomb::corpus
