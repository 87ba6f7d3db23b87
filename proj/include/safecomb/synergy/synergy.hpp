// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safecomb/corpus/record.hpp"
#include "safecomb/stats/stats.hpp"

namespace safecomb::synergy {

using corpus::Category;
using corpus::FeatureVector;
using corpus::Indicator;

/// Core structure of a pattern. Every `required` group needs at least one
/// of its categories present; no `forbidden` category may be present.
struct BaselinePredicate {
  std::string name;
  std::vector<std::vector<Category>> required;
  std::vector<Category> forbidden;
  int core_size = 2;

  bool satisfied_by(FeatureVector v) const noexcept;
  /// Throws UsageError when required and forbidden overlap or no valid
  /// record can satisfy the predicate.
  void validate() const;
  /// e.g. "(Exp|OffM)&ExpEv".
  std::string describe() const;
};

/// IAP, NP, AA, CE.
std::vector<BaselinePredicate> default_baselines();
nlohmann::json baseline_to_json(const BaselinePredicate& b);
/// {"name", "required": [["Exp","OffM"], ["ExpEv"]], "forbidden": [...]}
BaselinePredicate baseline_from_json(const nlohmann::json& j);
/// Throws UsageError naming the known baselines.
const BaselinePredicate& find_baseline(std::span<const BaselinePredicate> baselines, const std::string& name);

/// Categories that may be added on top of the baseline, in slot order.
std::vector<Category> peripheral_universe(const BaselinePredicate& baseline);

/// At most one frame; an absence marker excludes the rest of its dimension.
bool consistent_combination(FeatureVector s) noexcept;

/// Consistent non-empty subsets of `universe` with at most k_max members,
/// ordered by size, then lexicographically by slot.
std::vector<FeatureVector> enumerate_combinations(std::span<const Category> universe, int k_max);

/// Number of subsets the guard compares against the cap (sum of binomials).
double combination_budget(std::size_t universe_size, int k_max);

enum class WithoutRule {
  Complement,  ///< baseline records lacking at least one element of S
  None,        ///< baseline records holding no element of S
};

struct SynergyParams {
  int k_max = 4;
  std::size_t min_n = 300;
  stats::BootstrapParams bootstrap;
  WithoutRule without = WithoutRule::Complement;
  /// Bootstrap every non-degenerate combination, not only those with
  /// n_with > min_n (which are the only ones that can be significant).
  bool bootstrap_all = false;
  double combination_cap = 1e6;
  unsigned workers = 0;
  /// Prefix of per-combination seed keys; distinguishes e.g. source tiers.
  std::string scope;
};

/// Vectors and log(x+1) engagement columns of a corpus.
struct EngagementTable {
  std::vector<FeatureVector> vectors;
  std::array<std::vector<double>, 3> logs;

  static EngagementTable from_records(std::span<const corpus::MessageRecord> records);
  std::size_t size() const noexcept { return vectors.size(); }
  const std::vector<double>& column(Indicator i) const { return logs[static_cast<std::size_t>(i)]; }
};

struct CombinationEffect {
  std::string baseline;
  FeatureVector combination;
  Indicator indicator = Indicator::Likes;
  std::size_t n_with = 0;
  std::size_t n_without = 0;
  std::optional<double> delta_e;        ///< empty when a group is empty
  std::optional<stats::BootstrapCI> ci;  ///< empty when not bootstrapped
  bool significant = false;
  bool degenerate = false;

  int k() const noexcept { return combination.count(); }
};

/// Seed key of one combination's bootstrap.
std::string combination_key(const SynergyParams& params, const BaselinePredicate& baseline, FeatureVector s);

/// Effects of S on every requested indicator. The indicators share one
/// bootstrap resampling.
std::vector<CombinationEffect> evaluate_combination(const EngagementTable& table, const BaselinePredicate& baseline,
                                                    FeatureVector s, std::span<const Indicator> indicators,
                                                    const SynergyParams& params);
CombinationEffect evaluate_combination(const EngagementTable& table, const BaselinePredicate& baseline,
                                       FeatureVector s, Indicator indicator, const SynergyParams& params);

struct SweepResult {
  std::string baseline;
  std::size_t population = 0;
  std::size_t combinations = 0;  ///< per indicator
  std::vector<CombinationEffect> effects;  ///< by indicator, then delta_e descending
  std::vector<std::string> warnings;
};

/// Throws UsageError when the universe is too large for k_max.
SweepResult sweep(const EngagementTable& table, const BaselinePredicate& baseline,
                  std::span<const Indicator> indicators, const SynergyParams& params);

struct CurvePoint {
  std::string baseline;
  Indicator indicator = Indicator::Likes;
  int k = 0;
  double mean_delta_e = 0.0;
  std::size_t count = 0;
  std::optional<double> stderr_delta_e;  ///< needs two effects
};

struct ComplexityCurve {
  std::vector<CurvePoint> points;  ///< by baseline (first appearance), indicator, k
  std::vector<std::string> warnings;
};

/// Mean delta_e of significant effects per (baseline, indicator, k).
ComplexityCurve complexity_curve(std::span<const CombinationEffect> effects);

/// Report labels joined by `separator`, in the given order.
std::string format_combination(std::span<const Category> ordered, std::string_view separator = "+");
/// Same, in slot order.
std::string format_combination(FeatureVector s, std::string_view separator = "+");
/// Parses "Met+Util+Narr" style strings (any separator of '+', spaces).
FeatureVector parse_combination(std::string_view text);

struct Extremes {
  std::vector<CombinationEffect> positive;  ///< largest first
  std::vector<CombinationEffect> negative;  ///< most negative first
};

/// Best and worst significant effects of one baseline and indicator.
Extremes extremes(std::span<const CombinationEffect> effects, const std::string& baseline, Indicator indicator,
                  std::size_t count = 2);

/// "Met+Util+Narr+Valu (1.097); Met+Narr (1.056)". Empty list gives "–".
std::string format_effect_cell(std::span<const CombinationEffect> effects, int decimals = 3,
                               std::string_view separator = "+");

}  // namespace safecomb::synergy
