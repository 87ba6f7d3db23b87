// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include "safecomb/corpus/feature_vector.hpp"
#include "safecomb/rng.hpp"

namespace safecomb::synthgen {

using corpus::FeatureVector;

/// Restores the dimension invariants after bit flips: an absence marker
/// sharing its dimension with another category is cleared, two or more
/// frames collapse to the prototype's frame (else the lowest slot), and an
/// empty dimension gets its absence marker.
FeatureVector repair(FeatureVector v, FeatureVector prototype);

/// Flips each slot independently with probability `rate`, then repairs.
FeatureVector perturb(FeatureVector prototype, double rate, Rng& rng);

/// Each slot is present with probability 1/2, then repaired.
FeatureVector uniform_vector(Rng& rng);

}  // namespace safecomb::synthgen
