// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "safecomb/corpus/feature_vector.hpp"

namespace safecomb::cluster {

using corpus::FeatureVector;

/// Label for points outside every selected cluster.
inline constexpr int kNoise = -1;

enum class Metric { Euclidean };

struct ClusterParams {
  int min_cluster_size = 100;
  int min_samples = 25;
  Metric metric = Metric::Euclidean;
  /// Records drawn (without replacement) for the fit; clamped to the corpus.
  std::size_t subsample_size = 300'000;
  /// Distances below this are treated as equal to it when turned into
  /// lambda = 1 / distance. The default is the lattice spacing of 0/1
  /// vectors under the Euclidean metric: density is not resolved below one
  /// bit flip, and exact duplicates get a finite lambda.
  double distance_floor = 1.0;
  /// Collapse exact-duplicate vectors into weighted points before fitting.
  /// Labels are identical either way; collapsing is much faster.
  bool collapse_duplicates = true;
  std::uint64_t seed = 0;
  unsigned workers = 0;

  /// Throws UsageError on inconsistent values.
  void validate() const;
};

/// One condensed-tree row. `child` below point_count() is a fitted point
/// (a distinct vector); otherwise it is a cluster node.
struct CondensedRow {
  int parent = 0;
  int child = 0;
  double lambda = 0.0;
  std::size_t child_size = 0;
};

struct SelectedCluster {
  int label = 0;  ///< public cluster id, 0-based
  int node = 0;   ///< condensed-tree node
  double lambda_birth = 0.0;
  double lambda_death = 0.0;  ///< largest lambda at which a member leaves
  std::size_t size = 0;       ///< weighted member count
  std::vector<FeatureVector> exemplars;
};

/// Immutable result of fit().
struct ClusterModel {
  ClusterParams params;
  std::size_t corpus_size = 0;
  std::vector<std::size_t> fitted_indices;  ///< corpus rows in the fit, ascending
  std::vector<int> fitted_point;            ///< fitted row -> point index
  std::vector<FeatureVector> points;        ///< fitted points (distinct vectors when collapsed)
  std::vector<std::size_t> weights;
  std::vector<int> core_sq;  ///< squared core distance (= Hamming radius)
  std::vector<CondensedRow> tree;
  int root_node = 0;
  std::vector<SelectedCluster> clusters;  ///< ordered by label
  std::vector<int> point_labels;
  std::vector<double> point_strengths;
  std::vector<double> point_lambdas;  ///< lambda at which each point leaves its cluster

  std::size_t point_count() const noexcept { return points.size(); }
  double core_distance(std::size_t point) const;
  /// Labels of the fitted rows, in fitted_indices order.
  std::vector<int> fitted_labels() const;
  std::size_t noise_weight() const;
};

struct ClusterAssignment {
  std::vector<int> labels;  ///< one per input vector; kNoise for noise
  std::vector<double> strengths;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t noise_count() const;
  int cluster_count() const;
};

/// Seeded subsample -> core distances -> mutual reachability -> MST ->
/// single-linkage levels -> condensed tree -> excess-of-mass selection.
ClusterModel fit(std::span<const FeatureVector> vectors, const ClusterParams& params);

/// Extends a fitted model to new vectors. Vectors equal to a fitted point
/// take that point's label and strength. Others take the label of their
/// nearest fitted point under mutual reachability when that distance is
/// within the cluster's dissolution radius 1 / lambda_death; else NOISE.
ClusterAssignment approximate_predict(const ClusterModel& model, std::span<const FeatureVector> vectors);

/// fit() followed by approximate_predict() over the whole input.
ClusterAssignment fit_predict(std::span<const FeatureVector> vectors, const ClusterParams& params,
                              ClusterModel* model_out = nullptr);

struct StabilityReport {
  std::vector<std::uint64_t> seeds;
  std::vector<int> cluster_counts;
  std::vector<double> noise_fractions;  ///< on the evaluation sample
  std::vector<std::vector<double>> ari;  ///< pairwise, unit diagonal
  double mean_ari = 0.0;
  std::size_t evaluation_size = 0;
};

/// Fits `repeats` seeded subsamples and compares their predictions on one
/// shared evaluation sample (at most `evaluation_size` rows).
StabilityReport subsample_stability(std::span<const FeatureVector> vectors, const ClusterParams& params,
                                    int repeats, std::size_t evaluation_size = 20'000);
/// Same with explicit per-repeat seeds.
StabilityReport subsample_stability(std::span<const FeatureVector> vectors, const ClusterParams& params,
                                    std::span<const std::uint64_t> seeds,
                                    std::size_t evaluation_size = 20'000);

}  // namespace safecomb::cluster
