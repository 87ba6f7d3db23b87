// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safecomb/corpus/record.hpp"
#include "safecomb/synergy/synergy.hpp"
#include "safecomb/tiers/tiers.hpp"

namespace safecomb::synthgen {

using corpus::FeatureVector;

struct PatternPopulation {
  std::string name;
  std::size_t size = 0;
  FeatureVector prototype;
  /// Extra categories switched on with the given probability before flips.
  std::map<corpus::Category, double> peripheral_rates;
};

struct IndicatorModel {
  double mu0 = 2.0;  ///< log-scale mean
  double sigma0 = 1.0;
};

struct PlantedEffect {
  std::string baseline;
  FeatureVector combination;
  corpus::Indicator indicator = corpus::Indicator::Likes;
  double beta = 0.0;
  std::optional<tiers::Tier> tier;
};

struct GeneratorSpec {
  std::uint64_t seed = 0;
  std::vector<PatternPopulation> patterns;
  double flip_rate = 0.05;
  std::size_t uniform_noise = 0;
  std::size_t accounts = 100;
  double follower_mu = 8.0;  ///< log-normal follower counts
  double follower_sigma = 1.5;
  std::array<IndicatorModel, 3> engagement{};
  std::vector<PlantedEffect> effects;
  std::vector<synergy::BaselinePredicate> baselines = synergy::default_baselines();

  /// Throws UsageError on the first violated constraint.
  void validate() const;
};

/// Representative prototype of a default pattern (IAP, NP, AA, CE); throws
/// UsageError for other names.
FeatureVector default_prototype(const std::string& pattern);

/// Unknown keys are rejected. A pattern without "prototype" uses
/// default_prototype(name).
GeneratorSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const GeneratorSpec& spec);

struct GroundTruth {
  std::vector<std::string> pattern_names;  ///< planted label -> name
  std::vector<int> labels;                 ///< per record; -1 for uniform noise
  std::map<std::string, std::uint64_t> followers;
  std::map<std::string, tiers::Tier> tier_of;  ///< empty below three accounts
  std::vector<std::size_t> effect_matches;     ///< records receiving each effect

  nlohmann::json to_json(const GeneratorSpec& spec, const std::vector<corpus::MessageRecord>& records) const;
};

struct Generated {
  std::vector<corpus::MessageRecord> records;
  GroundTruth truth;
};

/// Records are in pattern order, then uniform noise. Every record uses its
/// own seed derived from (spec.seed, index), so worker count has no effect.
Generated generate(const GeneratorSpec& spec, unsigned workers = 0);

/// Planted labels back from a truth manifest, keyed by record id.
std::map<std::string, int> labels_from_truth(const nlohmann::json& truth);

}  // namespace safecomb::synthgen
