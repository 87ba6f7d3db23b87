// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safecomb/corpus/record.hpp"
#include "safecomb/stats/stats.hpp"
#include "safecomb/synergy/synergy.hpp"

namespace safecomb::tiers {

enum class Tier : std::uint8_t { Top = 0, Middle = 1, Bottom = 2 };
inline constexpr std::array<Tier, 3> kTiers{Tier::Top, Tier::Middle, Tier::Bottom};
std::string_view tier_name(Tier t) noexcept;
Tier parse_tier(std::string_view name);

template <class T>
using PerTier = std::array<T, 3>;

struct FollowerStats {
  std::size_t accounts = 0;
  std::optional<double> mean;
  std::optional<double> sd;  ///< sample SD, needs two accounts
};

struct TierPartition {
  std::map<std::string, Tier> tier_of;
  std::map<std::string, double> percentile;
  PerTier<FollowerStats> followers;
  std::optional<stats::AnovaResult> anova;  ///< empty when undefined
  std::string anova_note;                   ///< why it is undefined
  std::vector<std::string> warnings;

  /// Throws DataError for unknown accounts.
  Tier tier(const std::string& account) const;
};

/// Follower count per account: the largest value seen on its posts.
/// Accounts whose posts disagree are listed in `warnings` if given.
std::map<std::string, std::uint64_t> account_followers(std::span<const corpus::MessageRecord> records,
                                                       std::vector<std::string>* warnings = nullptr);

/// pct = 100 * #(strictly fewer followers) / #accounts; Top if pct >= 90,
/// Middle if pct >= 50, else Bottom. Throws DataError on an empty map and
/// UsageError below three accounts.
TierPartition assign_tiers(const std::map<std::string, std::uint64_t>& followers);

struct TierSweepParams {
  synergy::SynergyParams synergy;
  /// Scale min_n by the tier's share of records (at least 1).
  bool rescale_min_n = false;
};

struct TierSweep {
  PerTier<std::size_t> records{};
  PerTier<std::size_t> min_n{};
  PerTier<std::vector<synergy::SweepResult>> results;  ///< per tier, per baseline
  std::vector<std::string> warnings;

  /// All effects of one tier, baselines in input order.
  std::vector<synergy::CombinationEffect> effects(Tier t) const;
};

/// Runs the synergy sweep on each tier's records with unchanged baselines.
TierSweep tier_sweep(std::span<const corpus::MessageRecord> records, const TierPartition& partition,
                     std::span<const synergy::BaselinePredicate> baselines,
                     std::span<const corpus::Indicator> indicators, const TierSweepParams& params);

struct ComplexityDescriptives {
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> sd;
  std::optional<int> min;
  std::optional<int> max;
};

struct TierComplexity {
  PerTier<std::vector<double>> sizes;  ///< |S| of each significant effect
  PerTier<ComplexityDescriptives> descriptives;
  std::vector<Tier> tested;  ///< tiers entering the tests, in kTiers order
  std::optional<stats::RankTestResult> kruskal_wallis;
  std::optional<stats::PairwiseTestResult> dunn;  ///< group indices refer to `tested`
  std::vector<std::string> warnings;
};

TierComplexity complexity_comparison(const PerTier<std::vector<synergy::CombinationEffect>>& effects,
                                     stats::Adjust adjust = stats::Adjust::Holm);
TierComplexity complexity_comparison(const TierSweep& sweep, stats::Adjust adjust = stats::Adjust::Holm);

}  // namespace safecomb::tiers
