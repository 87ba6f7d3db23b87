// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/corpus/feature_vector.hpp"

#include "safecomb/error.hpp"

namespace safecomb::corpus {

std::uint32_t dimension_mask(Dimension d) noexcept {
  std::uint32_t mask = 0;
  for (const auto& row : taxonomy())
    if (row.dimension == d) mask |= 1u << slot(row.category);
  return mask;
}

FeatureVector FeatureVector::from(std::span<const Category> categories) noexcept {
  FeatureVector v;
  for (Category c : categories) v.set(c);
  return v;
}

FeatureVector FeatureVector::block(Dimension d) const noexcept {
  return FeatureVector(bits_ & dimension_mask(d));
}

std::vector<Category> FeatureVector::categories() const {
  std::vector<Category> out;
  for (std::size_t i = 0; i < kCategoryCount; ++i)
    if ((bits_ >> i) & 1u) out.push_back(category_at(i));
  return out;
}

std::vector<Category> FeatureVector::categories(Dimension d) const {
  return block(d).categories();
}

std::vector<double> FeatureVector::to_dense() const {
  std::vector<double> out(kCategoryCount);
  for (std::size_t i = 0; i < kCategoryCount; ++i) out[i] = static_cast<double>((bits_ >> i) & 1u);
  return out;
}

std::string FeatureVector::to_bitstring() const {
  std::string out(kCategoryCount, '0');
  for (std::size_t i = 0; i < kCategoryCount; ++i)
    if ((bits_ >> i) & 1u) out[i] = '1';
  return out;
}

FeatureVector FeatureVector::from_bitstring(std::string_view bits) {
  if (bits.size() != kCategoryCount) throw DataError("feature bitstring must have 20 characters");
  FeatureVector v;
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (bits[i] == '1') v.bits_ |= 1u << i;
    else if (bits[i] != '0') throw DataError("feature bitstring must hold only 0 and 1");
  }
  return v;
}

std::string validate_features(FeatureVector v) {
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    const auto dim = static_cast<Dimension>(d);
    const FeatureVector block = v.block(dim);
    const std::string name(dimension_name(dim));
    if (block.empty()) return "empty dimension: " + name;
    if (block.test(absence_marker(dim)) && block.count() > 1)
      return "absence marker co-occurrence: " + name;
    if (dim == Dimension::Frame && block.count() != 1)
      return "frame must hold exactly one category";
  }
  return {};
}

}  // namespace safecomb::corpus
