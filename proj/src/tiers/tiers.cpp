// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/tiers/tiers.hpp"

#include <algorithm>
#include <cmath>

#include "safecomb/error.hpp"

namespace safecomb::tiers {

std::string_view tier_name(Tier t) noexcept {
  switch (t) {
    case Tier::Top:
      return "Top";
    case Tier::Middle:
      return "Middle";
    case Tier::Bottom:
      return "Bottom";
  }
  return "?";
}

Tier parse_tier(std::string_view name) {
  for (Tier t : kTiers)
    if (tier_name(t) == name) return t;
  throw UsageError("unknown tier: " + std::string(name));
}

Tier TierPartition::tier(const std::string& account) const {
  const auto it = tier_of.find(account);
  if (it == tier_of.end()) throw DataError("account " + account + " is not in the tier partition");
  return it->second;
}

std::map<std::string, std::uint64_t> account_followers(std::span<const corpus::MessageRecord> records,
                                                       std::vector<std::string>* warnings) {
  std::map<std::string, std::uint64_t> out;
  std::map<std::string, bool> disagree;
  for (const auto& r : records) {
    auto [it, inserted] = out.try_emplace(r.account_id, r.followers);
    if (!inserted && it->second != r.followers) {
      disagree[r.account_id] = true;
      it->second = std::max(it->second, r.followers);
    }
  }
  if (warnings)
    for (const auto& [account, unused] : disagree)
      warnings->push_back("account " + account + " has differing follower counts; using the largest");
  return out;
}

TierPartition assign_tiers(const std::map<std::string, std::uint64_t>& followers) {
  if (followers.empty()) throw DataError("no accounts to tier");
  if (followers.size() < 3) throw UsageError("tiering needs at least three accounts");
  TierPartition p;
  const std::size_t n = followers.size();
  if (n < 10) p.warnings.push_back("only " + std::to_string(n) + " accounts; tiers are coarse");

  std::vector<std::uint64_t> sorted;
  for (const auto& [account, f] : followers) sorted.push_back(f);
  std::sort(sorted.begin(), sorted.end());

  PerTier<std::vector<double>> values;
  for (const auto& [account, f] : followers) {
    const auto smaller = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), f) - sorted.begin());
    const double pct = 100.0 * static_cast<double>(smaller) / static_cast<double>(n);
    // Integer form of pct >= 90 and pct >= 50, free of rounding.
    const Tier t = smaller * 10 >= n * 9 ? Tier::Top : smaller * 2 >= n ? Tier::Middle : Tier::Bottom;
    p.tier_of[account] = t;
    p.percentile[account] = pct;
    values[static_cast<std::size_t>(t)].push_back(static_cast<double>(f));
  }

  std::vector<std::vector<double>> groups;
  for (Tier t : kTiers) {
    const auto& v = values[static_cast<std::size_t>(t)];
    auto& s = p.followers[static_cast<std::size_t>(t)];
    s.accounts = v.size();
    if (!v.empty()) s.mean = stats::mean(v);
    if (v.size() >= 2) s.sd = stats::sample_sd(v);
    if (!v.empty()) groups.push_back(v);
  }
  if (groups.size() < 2) {
    p.anova_note = "fewer than two non-empty tiers";
  } else {
    try {
      p.anova = stats::anova_f(groups);
    } catch (const NumericError& e) {
      p.anova_note = e.what();
    }
  }
  if (!p.anova) p.warnings.push_back("tier ANOVA undefined: " + p.anova_note);
  return p;
}

std::vector<synergy::CombinationEffect> TierSweep::effects(Tier t) const {
  std::vector<synergy::CombinationEffect> out;
  for (const auto& r : results[static_cast<std::size_t>(t)]) out.insert(out.end(), r.effects.begin(), r.effects.end());
  return out;
}

TierSweep tier_sweep(std::span<const corpus::MessageRecord> records, const TierPartition& partition,
                     std::span<const synergy::BaselinePredicate> baselines,
                     std::span<const corpus::Indicator> indicators, const TierSweepParams& params) {
  PerTier<std::vector<corpus::MessageRecord>> split;
  for (const auto& r : records) split[static_cast<std::size_t>(partition.tier(r.account_id))].push_back(r);

  TierSweep out;
  for (Tier t : kTiers) {
    const auto i = static_cast<std::size_t>(t);
    out.records[i] = split[i].size();
    out.min_n[i] = params.synergy.min_n;
    if (params.rescale_min_n && !records.empty())
      out.min_n[i] = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(static_cast<double>(params.synergy.min_n) *
                                                   static_cast<double>(split[i].size()) /
                                                   static_cast<double>(records.size()))));
  }
  // Tiers run one after another; each sweep is parallel inside.
  for (Tier t : kTiers) {
    const auto i = static_cast<std::size_t>(t);
    const auto table = synergy::EngagementTable::from_records(split[i]);
    synergy::SynergyParams sp = params.synergy;
    sp.min_n = out.min_n[i];
    sp.scope = (params.synergy.scope.empty() ? "" : params.synergy.scope + "/") + "tier/" + std::string(tier_name(t));
    for (const auto& b : baselines) {
      auto result = synergy::sweep(table, b, indicators, sp);
      if (result.population == 0)
        out.warnings.push_back(std::string(tier_name(t)) + " tier has no posts satisfying baseline " + b.name);
      out.results[i].push_back(std::move(result));
    }
  }
  return out;
}

TierComplexity complexity_comparison(const PerTier<std::vector<synergy::CombinationEffect>>& effects,
                                     stats::Adjust adjust) {
  TierComplexity out;
  for (Tier t : kTiers) {
    const auto i = static_cast<std::size_t>(t);
    for (const auto& e : effects[i])
      if (e.significant) out.sizes[i].push_back(static_cast<double>(e.k()));
    const auto& v = out.sizes[i];
    auto& d = out.descriptives[i];
    d.count = v.size();
    if (!v.empty()) {
      d.mean = stats::mean(v);
      d.min = static_cast<int>(*std::min_element(v.begin(), v.end()));
      d.max = static_cast<int>(*std::max_element(v.begin(), v.end()));
    }
    if (v.size() >= 2) d.sd = stats::sample_sd(v);
    if (!v.empty()) out.tested.push_back(t);
  }
  if (out.tested.empty()) throw DataError("no tier has a significant combination");
  if (out.tested.size() < 2) {
    out.warnings.push_back("fewer than two tiers with significant combinations; Kruskal-Wallis and Dunn skipped");
    return out;
  }
  std::vector<std::vector<double>> groups;
  for (Tier t : out.tested) groups.push_back(out.sizes[static_cast<std::size_t>(t)]);
  out.kruskal_wallis = stats::kruskal_wallis(groups);
  out.dunn = stats::dunn_posthoc(groups, adjust);
  return out;
}

TierComplexity complexity_comparison(const TierSweep& sweep, stats::Adjust adjust) {
  PerTier<std::vector<synergy::CombinationEffect>> effects;
  for (Tier t : kTiers) effects[static_cast<std::size_t>(t)] = sweep.effects(t);
  return complexity_comparison(effects, adjust);
}

}  // namespace safecomb::tiers
