// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include <catch_amalgamated.hpp>

#include "safecomb/error.hpp"
#include "safecomb/tiers/tiers.hpp"

using namespace safecomb;
using namespace safecomb::tiers;
using C = corpus::Category;
using Catch::Approx;

namespace {

std::size_t idx(Tier t) { return static_cast<std::size_t>(t); }

synergy::CombinationEffect effect(int k, bool significant) {
  synergy::CombinationEffect e;
  const C pool[] = {C::Sex, C::Fear, C::Humor, C::Valu, C::Util};
  for (int i = 0; i < k; ++i) e.combination.set(pool[i]);
  e.significant = significant;
  return e;
}

}  // namespace

TEST_CASE("ten distinct accounts split 1/4/5") {
  std::map<std::string, std::uint64_t> f;
  for (int i = 0; i < 10; ++i) f["a" + std::to_string(i)] = 100 * (i + 1);
  const auto p = assign_tiers(f);
  CHECK(p.followers[idx(Tier::Top)].accounts == 1);
  CHECK(p.followers[idx(Tier::Middle)].accounts == 4);
  CHECK(p.followers[idx(Tier::Bottom)].accounts == 5);
  CHECK(p.tier("a9") == Tier::Top);
  CHECK(p.tier("a5") == Tier::Middle);
  CHECK(p.tier("a4") == Tier::Bottom);
  CHECK(p.percentile.at("a0") == 0.0);
  CHECK(p.percentile.at("a9") == Approx(90.0));
  CHECK_THROWS_AS(p.tier("nobody"), DataError);
  // Single-account Top tier still leaves n > groups.
  REQUIRE(p.anova.has_value());
  CHECK(p.anova->df_between == 2);
  CHECK(p.anova->df_within == 7);
}

TEST_CASE("identical follower counts put everyone in Bottom") {
  std::map<std::string, std::uint64_t> f{{"a", 5}, {"b", 5}, {"c", 5}, {"d", 5}};
  const auto p = assign_tiers(f);
  CHECK(p.followers[idx(Tier::Bottom)].accounts == 4);
  CHECK_FALSE(p.anova.has_value());
  CHECK_FALSE(p.anova_note.empty());
  CHECK_FALSE(p.warnings.empty());
}

TEST_CASE("too few accounts") {
  CHECK_THROWS_AS(assign_tiers({}), DataError);
  CHECK_THROWS_AS(assign_tiers({{"a", 1}, {"b", 2}}), UsageError);
}

TEST_CASE("follower count per account is the largest seen") {
  std::vector<corpus::MessageRecord> rs(3);
  rs[0].account_id = "x";
  rs[0].followers = 10;
  rs[1].account_id = "x";
  rs[1].followers = 12;
  rs[2].account_id = "y";
  rs[2].followers = 3;
  std::vector<std::string> warnings;
  const auto f = account_followers(rs, &warnings);
  CHECK(f.at("x") == 12);
  CHECK(f.at("y") == 3);
  CHECK(warnings.size() == 1);
}

TEST_CASE("complexity descriptives and tests on separated tiers") {
  PerTier<std::vector<synergy::CombinationEffect>> e;
  for (int i = 0; i < 6; ++i) e[0].push_back(effect(1, true));
  for (int i = 0; i < 6; ++i) e[1].push_back(effect(2, true));
  for (int i = 0; i < 6; ++i) e[2].push_back(effect(3, true));
  e[2].push_back(effect(5, false));
  const auto c = complexity_comparison(e);
  CHECK(c.descriptives[2].count == 6);
  CHECK(*c.descriptives[1].mean == 2.0);
  CHECK(*c.descriptives[1].sd == 0.0);
  CHECK(*c.descriptives[2].max == 3);
  REQUIRE(c.kruskal_wallis);
  CHECK(c.kruskal_wallis->df == 2);
  CHECK(c.kruskal_wallis->p_value < 0.001);
  REQUIRE(c.dunn);
  CHECK(c.dunn->pairs.size() == 3);
  CHECK(c.dunn->adjust == stats::Adjust::Holm);
}

TEST_CASE("identical tiers give H = 0 and Dunn p = 1") {
  PerTier<std::vector<synergy::CombinationEffect>> e;
  for (auto& t : e)
    for (int k : {1, 2, 2, 3}) t.push_back(effect(k, true));
  const auto c = complexity_comparison(e);
  CHECK(c.kruskal_wallis->statistic == Approx(0.0).margin(1e-12));
  for (const auto& p : c.dunn->pairs) CHECK(p.p_adjusted == Approx(1.0));
}

TEST_CASE("one tier with effects skips the tests") {
  PerTier<std::vector<synergy::CombinationEffect>> e;
  e[1].push_back(effect(2, true));
  const auto c = complexity_comparison(e);
  CHECK_FALSE(c.kruskal_wallis);
  CHECK(c.tested.size() == 1);
  CHECK_FALSE(c.warnings.empty());
  CHECK_THROWS_AS(complexity_comparison(PerTier<std::vector<synergy::CombinationEffect>>{}), DataError);
}

TEST_CASE("tier sweep scopes seeds by tier and rescales min_n") {
  std::vector<corpus::MessageRecord> rs;
  for (int i = 0; i < 40; ++i) {
    corpus::MessageRecord r;
    r.id = std::to_string(i);
    r.account_id = "acc" + std::to_string(i % 10);
    r.followers = static_cast<std::uint64_t>(i % 10) * 100;
    r.labels = i % 2 ? corpus::FeatureVector{C::NoSrc, C::Valu, C::Gain, C::NoEv}
                     : corpus::FeatureVector{C::NoSrc, C::NoApp, C::NoFrm, C::NoEv};
    r.likes = static_cast<std::uint64_t>(i);
    rs.push_back(r);
  }
  const auto p = assign_tiers(account_followers(rs));
  const auto baselines = synergy::default_baselines();
  TierSweepParams params;
  params.synergy.k_max = 1;
  params.synergy.min_n = 40;
  params.rescale_min_n = true;
  const std::vector<corpus::Indicator> ind{corpus::Indicator::Likes};
  const auto s = tier_sweep(rs, p, baselines, ind, params);
  CHECK(s.records[idx(Tier::Top)] == 4);
  CHECK(s.records[idx(Tier::Bottom)] == 20);
  CHECK(s.min_n[idx(Tier::Top)] == 4);
  CHECK(s.min_n[idx(Tier::Bottom)] == 20);
  CHECK(s.results[0].size() == baselines.size());
}
