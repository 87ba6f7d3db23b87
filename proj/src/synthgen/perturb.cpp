// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/synthgen/perturb.hpp"

namespace safecomb::synthgen {

using corpus::Category;
using corpus::Dimension;

FeatureVector repair(FeatureVector v, FeatureVector prototype) {
  for (std::size_t d = 0; d < corpus::kDimensionCount; ++d) {
    const auto dim = static_cast<Dimension>(d);
    const Category marker = corpus::absence_marker(dim);
    if (v.test(marker) && v.block(dim).count() > 1) v.clear(marker);
    if (dim == Dimension::Frame && v.block(dim).count() > 1) {
      const FeatureVector kept = v.block(dim) & prototype.block(dim);
      const auto cats = (kept.empty() ? v.block(dim) : kept).categories();
      for (Category c : corpus::categories_of(dim)) v.clear(c);
      v.set(cats.front());
    }
    if (v.block(dim).empty()) v.set(marker);
  }
  return v;
}

FeatureVector perturb(FeatureVector prototype, double rate, Rng& rng) {
  FeatureVector v = prototype;
  for (std::size_t i = 0; i < corpus::kCategoryCount; ++i)
    if (rng.chance(rate)) v.flip(corpus::category_at(i));
  return repair(v, prototype);
}

FeatureVector uniform_vector(Rng& rng) {
  FeatureVector v;
  for (std::size_t i = 0; i < corpus::kCategoryCount; ++i)
    if (rng.chance(0.5)) v.set(corpus::category_at(i));
  return repair(v, FeatureVector{});
}

}  // namespace safecomb::synthgen
