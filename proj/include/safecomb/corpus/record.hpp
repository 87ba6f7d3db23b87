// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "safecomb/corpus/feature_vector.hpp"

namespace safecomb::corpus {

/// Engagement indicators, in the order used by every table.
enum class Indicator : std::uint8_t { Likes = 0, Comments = 1, Shares = 2 };
inline constexpr std::array<Indicator, 3> kIndicators{Indicator::Likes, Indicator::Comments,
                                                     Indicator::Shares};
std::string_view indicator_name(Indicator i) noexcept;
/// Throws UsageError on unknown names.
Indicator parse_indicator(std::string_view name);
std::vector<Indicator> parse_indicator_list(std::string_view comma_separated);

/// One coded post. Label sets are stored as a FeatureVector; records are
/// immutable once they leave the reader.
struct MessageRecord {
  std::string id;
  std::string account_id;
  std::uint64_t followers = 0;
  std::uint64_t likes = 0;
  std::uint64_t comments = 0;
  std::uint64_t shares = 0;
  FeatureVector labels;

  std::vector<Category> source() const { return labels.categories(Dimension::Source); }
  std::vector<Category> appeal() const { return labels.categories(Dimension::Appeal); }
  Category frame() const;
  std::vector<Category> evidence() const { return labels.categories(Dimension::Evidence); }

  std::uint64_t count(Indicator i) const noexcept;

  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

/// log(count + 1) per indicator, natural log.
struct EngagementTriple {
  double likes_log = 0.0;
  double comments_log = 0.0;
  double shares_log = 0.0;

  double operator[](Indicator i) const noexcept;
};

/// Identity on valid records; records are stored encoded.
FeatureVector encode_features(const MessageRecord& record) noexcept;

/// Label sets of a vector, one list per dimension in slot order.
struct DecodedLabels {
  std::vector<Category> source;
  std::vector<Category> appeal;
  std::vector<Category> frame;
  std::vector<Category> evidence;
  friend bool operator==(const DecodedLabels&, const DecodedLabels&) = default;
};
DecodedLabels decode_features(FeatureVector v);

EngagementTriple log_engagement(const MessageRecord& record) noexcept;
double log1p_count(std::uint64_t count) noexcept;

}  // namespace safecomb::corpus
