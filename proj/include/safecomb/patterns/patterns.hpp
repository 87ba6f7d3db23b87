// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safecomb/cluster/hdbscan.hpp"
#include "safecomb/corpus/feature_vector.hpp"

namespace safecomb::patterns {

using corpus::Category;
using corpus::FeatureVector;

using Centroid = std::array<double, corpus::kCategoryCount>;

struct ClusterProfile {
  int cluster = 0;
  std::size_t size = 0;
  Centroid centroid{};
  std::vector<Category> dominant;  ///< prevalence >= threshold, slot order
};

/// One profile per non-noise cluster, ordered by cluster id. Throws
/// DataError when every record is noise.
std::vector<ClusterProfile> profile_clusters(const cluster::ClusterAssignment& assignment,
                                             std::span<const FeatureVector> vectors,
                                             double dominance_threshold = 0.5);

struct Prototype {
  FeatureVector vector;
  std::string note;  ///< free text, e.g. the cluster it stands for
};

struct PatternDef {
  std::string name;
  std::vector<Prototype> prototypes;
};

struct PatternConfig {
  std::vector<PatternDef> patterns;
  std::map<int, std::string> overrides;  ///< cluster id -> pattern name

  /// Throws UsageError on duplicate names, invalid prototypes or overrides
  /// naming an unknown pattern.
  void validate() const;
  const PatternDef* find(const std::string& name) const;
};

/// IAP, NP, AA and CE with their representative combinations. Alternatives
/// ("Valu/Util") expand into separate prototypes.
PatternConfig default_pattern_config();

nlohmann::json pattern_config_to_json(const PatternConfig& config);
/// Accepts {"patterns": [{"name", "prototypes": [[codes...], ...]}],
/// "overrides": {"<cluster>": "<pattern>"}}.
PatternConfig pattern_config_from_json(const nlohmann::json& j);

struct PatternAssignment {
  int cluster = 0;
  std::string pattern;
  double score = 0.0;     ///< cosine to the best prototype of `pattern`
  FeatureVector matched;  ///< that prototype
  bool overridden = false;
};

struct PatternMap {
  std::vector<PatternAssignment> assignments;  ///< ordered by cluster id
  std::vector<std::string> warnings;

  const std::string& pattern_of(int cluster) const;
};

PatternMap assign_patterns(std::span<const ClusterProfile> profiles, const PatternConfig& config);

struct WithinPattern {
  std::string pattern;
  std::vector<int> clusters;
  std::size_t pairs = 0;
  std::optional<double> mean;  ///< empty for single-cluster patterns
};

struct SimilarPair {
  int a = 0;
  int b = 0;
  double similarity = 0.0;
};

struct SimilarityReport {
  std::vector<int> clusters;
  std::vector<std::vector<double>> matrix;
  std::vector<WithinPattern> within;  ///< in pattern declaration order, empty patterns skipped
  std::optional<double> global_mean;  ///< over unordered off-diagonal pairs
  std::optional<double> global_sd;    ///< sample SD, needs two pairs
  double pair_threshold = 0.6;
  std::vector<SimilarPair> high_pairs;  ///< similarity > pair_threshold, a < b
};

SimilarityReport similarity_report(std::span<const ClusterProfile> profiles, const PatternMap& patterns,
                                   const PatternConfig& config, double pair_threshold = 0.6);

nlohmann::json similarity_summary_json(const SimilarityReport& report);

}  // namespace safecomb::patterns
