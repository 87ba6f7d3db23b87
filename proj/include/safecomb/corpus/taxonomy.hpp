// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace safecomb::corpus {

/// The four SAFE dimensions, in canonical order.
enum class Dimension : std::uint8_t { Source = 0, Appeal = 1, Frame = 2, Evidence = 3 };

inline constexpr std::size_t kDimensionCount = 4;
inline constexpr std::size_t kCategoryCount = 20;

/// SAFE categories. The numeric value is the slot in a FeatureVector.
enum class Category : std::uint8_t {
  Exp = 0,
  OffM,
  NoSrc,
  Sex,
  Fear,
  Humor,
  Valu,
  Util,
  Dual,
  Comp,
  Met,
  NoApp,
  Gain,
  Loss,
  NoFrm,
  NarrEv,
  StatEv,
  ExpEv,
  CausEv,
  NoEv,
};

struct CategoryInfo {
  Category category;
  Dimension dimension;
  std::string_view code;          ///< canonical short code, used in input files
  std::string_view report_label;  ///< compact label used in combination strings
  std::string_view name;          ///< long form
  bool absence_marker;
};

/// Static taxonomy table in slot order.
const std::array<CategoryInfo, kCategoryCount>& taxonomy() noexcept;

const CategoryInfo& info(Category c) noexcept;
constexpr std::size_t slot(Category c) noexcept { return static_cast<std::size_t>(c); }
constexpr Category category_at(std::size_t slot) noexcept { return static_cast<Category>(slot); }

std::string_view code(Category c) noexcept;
std::string_view report_label(Category c) noexcept;
Dimension dimension_of(Category c) noexcept;
std::string_view dimension_name(Dimension d) noexcept;

/// The "no X" category of a dimension.
Category absence_marker(Dimension d) noexcept;
bool is_absence_marker(Category c) noexcept;

/// Categories of one dimension in slot order.
std::vector<Category> categories_of(Dimension d);

/// Accepts canonical codes, report labels and long names (e.g. "Valu",
/// "Value", "NarrEv", "Narr"). Case-sensitive.
std::optional<Category> parse_category(std::string_view text) noexcept;

}  // namespace safecomb::corpus
