// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace safecomb::stats {

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_sd(std::span<const double> values);
/// Type-7 (linear interpolation) empirical quantile of unsorted data.
double quantile(std::vector<double> values, double prob);

/// mean(with) - mean(without). Throws NumericError on an empty group.
double mean_log_diff(std::span<const double> group_with, std::span<const double> group_without);

struct BootstrapParams {
  int resamples = 500;
  double level = 0.95;
  std::uint64_t seed = 0;
};

struct BootstrapCI {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  int resamples = 500;
  std::uint64_t seed = 0;
};

/// Percentile bootstrap for mean_log_diff. Each resample draws |with| values
/// from group_with, then |without| values from group_without, with
/// replacement, from one Rng(seed) stream.
BootstrapCI bootstrap_ci(std::span<const double> group_with, std::span<const double> group_without,
                         const BootstrapParams& params);

/// Same resampling as bootstrap_ci, applied to several value columns of the
/// same two groups at once: every column sees the identical index draws, so
/// column j of the result equals bootstrap_ci on column j alone.
/// columns_with[j] and columns_without[j] hold column j's values.
std::vector<BootstrapCI> bootstrap_ci_columns(std::span<const std::vector<double>> columns_with,
                                              std::span<const std::vector<double>> columns_without,
                                              const BootstrapParams& params);

struct RankTestResult {
  double statistic = 0.0;  ///< H
  int df = 0;
  double p_value = 1.0;
  std::vector<std::size_t> group_sizes;
};

/// Kruskal-Wallis H on mid-ranks with tie correction. All-tied data gives H = 0.
RankTestResult kruskal_wallis(std::span<const std::vector<double>> groups);

enum class Adjust { None, Holm, Bonferroni };
Adjust parse_adjust(std::string_view name);
std::string_view adjust_name(Adjust a) noexcept;

struct PairwiseComparison {
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  double z = 0.0;  ///< (mean rank a - mean rank b) / se
  double p_raw = 1.0;
  double p_adjusted = 1.0;
};

struct PairwiseTestResult {
  Adjust adjust = Adjust::Holm;
  std::vector<PairwiseComparison> pairs;  ///< (0,1), (0,2), ..., (1,2), ...
};

/// Dunn's test with tie-corrected pooled variance and two-sided normal p.
PairwiseTestResult dunn_posthoc(std::span<const std::vector<double>> groups, Adjust adjust);

/// Adjusted p-values in input order.
std::vector<double> adjust_p_values(std::span<const double> p_raw, Adjust adjust);

struct AnovaResult {
  double f = 0.0;  ///< +infinity when within-group variance is zero
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
};

/// Classical one-way ANOVA. Throws NumericError on fewer than two groups,
/// an empty group, total n <= number of groups, or all-constant data.
AnovaResult anova_f(std::span<const std::vector<double>> groups);

struct AgreementResult {
  double kappa = 0.0;
  double accuracy = 0.0;
  std::size_t n = 0;
};

/// Cohen's kappa with marginal-product chance agreement.
AgreementResult cohen_kappa(std::span<const std::string> labels_a, std::span<const std::string> labels_b);

/// Throws NumericError on dimension mismatch or a zero vector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// Hubert-Arabie adjusted Rand index of two labelings of the same items.
/// Two single-block partitions compare as 1.
double adjusted_rand_index(std::span<const int> labels_a, std::span<const int> labels_b);

/// Upper tail of chi-squared with `df` degrees of freedom.
double chi_squared_sf(double x, double df);
/// Upper tail of F(d1, d2).
double f_sf(double x, double d1, double d2);
/// Two-sided normal p-value for a z statistic.
double normal_two_sided_p(double z);

}  // namespace safecomb::stats
