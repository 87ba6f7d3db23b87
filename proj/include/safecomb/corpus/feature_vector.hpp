// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "safecomb/corpus/taxonomy.hpp"

namespace safecomb::corpus {

/// 20-slot presence/absence vector; bit i is taxonomy slot i.
class FeatureVector {
 public:
  static constexpr std::uint32_t kMask = (1u << kCategoryCount) - 1;

  constexpr FeatureVector() noexcept = default;
  constexpr explicit FeatureVector(std::uint32_t bits) noexcept : bits_(bits & kMask) {}
  constexpr FeatureVector(std::initializer_list<Category> categories) noexcept {
    for (Category c : categories) set(c);
  }
  static FeatureVector from(std::span<const Category> categories) noexcept;

  constexpr std::uint32_t bits() const noexcept { return bits_; }
  constexpr bool test(Category c) const noexcept { return (bits_ >> slot(c)) & 1u; }
  constexpr void set(Category c) noexcept { bits_ |= 1u << slot(c); }
  constexpr void clear(Category c) noexcept { bits_ &= ~(1u << slot(c)); }
  constexpr void flip(Category c) noexcept { bits_ ^= 1u << slot(c); }
  constexpr int count() const noexcept { return std::popcount(bits_); }
  constexpr bool contains_all(FeatureVector other) const noexcept {
    return (bits_ & other.bits_) == other.bits_;
  }
  constexpr bool empty() const noexcept { return bits_ == 0; }

  /// Bits restricted to one dimension's slots.
  FeatureVector block(Dimension d) const noexcept;
  std::vector<Category> categories() const;
  std::vector<Category> categories(Dimension d) const;

  /// 0/1 values in slot order.
  std::vector<double> to_dense() const;
  /// "10010..." in slot order.
  std::string to_bitstring() const;
  /// Inverse of to_bitstring(); throws DataError on bad input.
  static FeatureVector from_bitstring(std::string_view bits);

  friend constexpr bool operator==(FeatureVector, FeatureVector) noexcept = default;
  friend constexpr auto operator<=>(FeatureVector, FeatureVector) noexcept = default;
  friend constexpr FeatureVector operator|(FeatureVector a, FeatureVector b) noexcept {
    return FeatureVector(a.bits_ | b.bits_);
  }
  friend constexpr FeatureVector operator&(FeatureVector a, FeatureVector b) noexcept {
    return FeatureVector(a.bits_ & b.bits_);
  }

 private:
  std::uint32_t bits_ = 0;
};

/// Hamming distance between two vectors.
constexpr int hamming(FeatureVector a, FeatureVector b) noexcept {
  return std::popcount(a.bits() ^ b.bits());
}

/// Slot mask covering one dimension.
std::uint32_t dimension_mask(Dimension d) noexcept;

/// Empty string when the vector satisfies every dimension invariant,
/// otherwise the first violation ("absence marker co-occurrence: Source", ...).
std::string validate_features(FeatureVector v);

}  // namespace safecomb::corpus
