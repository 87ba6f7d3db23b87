// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/corpus/record.hpp"

#include <cmath>
#include <string>

#include "safecomb/error.hpp"

namespace safecomb::corpus {

std::string_view indicator_name(Indicator i) noexcept {
  switch (i) {
    case Indicator::Likes: return "likes";
    case Indicator::Comments: return "comments";
    case Indicator::Shares: return "shares";
  }
  return "?";
}

Indicator parse_indicator(std::string_view name) {
  for (Indicator i : kIndicators)
    if (indicator_name(i) == name) return i;
  throw UsageError("unknown indicator '" + std::string(name) + "' (expected likes, comments, shares)");
}

std::vector<Indicator> parse_indicator_list(std::string_view text) {
  std::vector<Indicator> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    if (!piece.empty()) {
      const Indicator ind = parse_indicator(piece);
      bool seen = false;
      for (Indicator o : out) seen = seen || o == ind;
      if (!seen) out.push_back(ind);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw UsageError("indicator list is empty");
  return out;
}

Category MessageRecord::frame() const {
  const auto frames = labels.categories(Dimension::Frame);
  return frames.empty() ? Category::NoFrm : frames.front();
}

std::uint64_t MessageRecord::count(Indicator i) const noexcept {
  switch (i) {
    case Indicator::Likes: return likes;
    case Indicator::Comments: return comments;
    case Indicator::Shares: return shares;
  }
  return 0;
}

double EngagementTriple::operator[](Indicator i) const noexcept {
  switch (i) {
    case Indicator::Likes: return likes_log;
    case Indicator::Comments: return comments_log;
    case Indicator::Shares: return shares_log;
  }
  return 0.0;
}

FeatureVector encode_features(const MessageRecord& record) noexcept { return record.labels; }

DecodedLabels decode_features(FeatureVector v) {
  return {v.categories(Dimension::Source), v.categories(Dimension::Appeal),
          v.categories(Dimension::Frame), v.categories(Dimension::Evidence)};
}

double log1p_count(std::uint64_t count) noexcept { return std::log1p(static_cast<double>(count)); }

EngagementTriple log_engagement(const MessageRecord& record) noexcept {
  return {log1p_count(record.likes), log1p_count(record.comments), log1p_count(record.shares)};
}

}  // namespace safecomb::corpus
