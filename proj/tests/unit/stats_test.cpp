// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "safecomb/error.hpp"
#include "safecomb/rng.hpp"
#include "safecomb/stats/stats.hpp"

using namespace safecomb::stats;
using safecomb::NumericError;
using safecomb::Rng;
using Catch::Approx;

namespace {

std::vector<double> log1p_all(std::initializer_list<double> raw) {
  std::vector<double> out;
  for (double x : raw) out.push_back(std::log1p(x));
  return out;
}

std::vector<std::string> labels_from_counts(int a, int b, int c, int d, bool first) {
  // 2x2 table: a = (x, x), b = (x, y), c = (y, x), d = (y, y).
  std::vector<std::string> out;
  auto push = [&](int n, const char* ra, const char* rb) {
    for (int i = 0; i < n; ++i) out.emplace_back(first ? ra : rb);
  };
  push(a, "x", "x");
  push(b, "x", "y");
  push(c, "y", "x");
  push(d, "y", "y");
  return out;
}

}  // namespace

TEST_CASE("mean_log_diff") {
  CHECK(mean_log_diff(std::vector{0.0, 0.0}, std::vector{0.0, 0.0}) == 0.0);
  const auto with = log1p_all({1, 3});
  const auto without = log1p_all({0, 0});
  CHECK(mean_log_diff(with, without) == Approx(1.039720770839918).epsilon(1e-12));
  CHECK(mean_log_diff(without, with) == -mean_log_diff(with, without));
  CHECK_THROWS_AS(mean_log_diff(std::vector<double>{}, without), NumericError);
  CHECK_THROWS_AS(mean_log_diff(with, std::vector<double>{}), NumericError);
}

TEST_CASE("mean_log_diff is permutation invariant and antisymmetric") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(1 + rng.below(40)), b(1 + rng.below(40));
    for (double& x : a) x = rng.normal(1.0, 2.0);
    for (double& x : b) x = rng.normal(0.0, 1.0);
    const double d = mean_log_diff(a, b);
    CHECK(mean_log_diff(b, a) == Approx(-d).margin(1e-12));
    std::reverse(a.begin(), a.end());
    std::rotate(b.begin(), b.begin() + static_cast<long>(b.size() / 2), b.end());
    CHECK(mean_log_diff(a, b) == Approx(d).margin(1e-12));
  }
}

TEST_CASE("type-7 quantile matches numpy") {
  const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(quantile(v, 0.025) == Approx(1.0));
  CHECK(quantile(v, 0.975) == Approx(8.475));
  CHECK(quantile(v, 0.5) == Approx(3.5));
}

TEST_CASE("bootstrap on constant groups is degenerate") {
  const std::vector<double> with(30, 2.5), without(17, 0.75);
  const auto ci = bootstrap_ci(with, without, {.resamples = 200, .level = 0.95, .seed = 9});
  CHECK(ci.point == 1.75);
  CHECK(ci.lo == 1.75);
  CHECK(ci.hi == 1.75);
}

TEST_CASE("bootstrap is deterministic given the seed") {
  Rng rng(5);
  std::vector<double> a(80), b(120);
  for (double& x : a) x = rng.normal(0.3, 1.0);
  for (double& x : b) x = rng.normal(0.0, 1.0);
  const BootstrapParams params{.resamples = 500, .level = 0.95, .seed = 42};
  const auto first = bootstrap_ci(a, b, params);
  const auto second = bootstrap_ci(a, b, params);
  CHECK(first.point == second.point);
  CHECK(first.lo == second.lo);
  CHECK(first.hi == second.hi);
  CHECK(first.lo <= first.point);
  CHECK(first.point <= first.hi);
  const auto other = bootstrap_ci(a, b, {.resamples = 500, .level = 0.95, .seed = 43});
  CHECK((other.lo != first.lo || other.hi != first.hi));
}

TEST_CASE("bootstrap columns share index draws") {
  Rng rng(8);
  std::vector<std::vector<double>> with(3, std::vector<double>(40)), without(3, std::vector<double>(70));
  for (auto& col : with)
    for (double& x : col) x = rng.normal(0.5, 1.0);
  for (auto& col : without)
    for (double& x : col) x = rng.normal(0.0, 1.0);
  const BootstrapParams params{.resamples = 300, .level = 0.9, .seed = 77};
  const auto joint = bootstrap_ci_columns(with, without, params);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto single = bootstrap_ci(with[j], without[j], params);
    CHECK(joint[j].lo == single.lo);
    CHECK(joint[j].hi == single.hi);
    CHECK(joint[j].point == single.point);
  }
}

TEST_CASE("bootstrap rejects bad arguments") {
  const std::vector<double> a{1.0}, empty;
  CHECK_THROWS_AS(bootstrap_ci(a, empty, {}), NumericError);
  CHECK_THROWS_AS(bootstrap_ci(a, a, {.resamples = 0}), NumericError);
  CHECK_THROWS_AS(bootstrap_ci(a, a, {.resamples = 10, .level = 1.0}), NumericError);
}

TEST_CASE("bootstrap CI narrows as groups grow") {
  Rng rng(12);
  auto width = [&](std::size_t n) {
    std::vector<double> a(n), b(n);
    for (double& x : a) x = rng.normal(0.0, 1.0);
    for (double& x : b) x = rng.normal(0.0, 1.0);
    const auto ci = bootstrap_ci(a, b, {.resamples = 400, .level = 0.95, .seed = n});
    return ci.hi - ci.lo;
  };
  const double small = width(50);
  const double large = width(2000);
  CHECK(large < small);
  CHECK(large == Approx(2 * 1.96 * std::sqrt(2.0 / 2000)).epsilon(0.2));
}

TEST_CASE("bootstrap null coverage (reduced scale)") {
  int covered = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Rng data(safecomb::derive_seed(1, "null-data/" + std::to_string(t)));
    std::vector<double> a(100), b(100);
    for (double& x : a) x = data.normal(1.0, 0.8);
    for (double& x : b) x = data.normal(1.0, 0.8);
    const auto ci = bootstrap_ci(a, b, {.resamples = 300, .level = 0.95, .seed = static_cast<std::uint64_t>(t)});
    if (ci.lo <= 0.0 && 0.0 <= ci.hi) ++covered;
  }
  const double rate = static_cast<double>(covered) / trials;
  CHECK(rate > 0.89);
  CHECK(rate < 0.99);
}

TEST_CASE("Kruskal-Wallis") {
  const std::vector<std::vector<double>> groups{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto r = kruskal_wallis(groups);
  CHECK(r.statistic == Approx(7.2).margin(1e-12));
  CHECK(r.df == 2);
  CHECK(r.p_value == Approx(0.02732372244729252).epsilon(1e-10));
  CHECK(r.group_sizes == std::vector<std::size_t>{3, 3, 3});

  const std::vector<std::vector<double>> tied{{4, 4}, {4, 4, 4}, {4}};
  const auto z = kruskal_wallis(tied);
  CHECK(z.statistic == 0.0);
  CHECK(z.p_value == 1.0);

  // scipy.stats.kruskal on a tie-heavy input.
  const std::vector<std::vector<double>> ties{{1, 1, 1, 2, 2}, {2, 2, 3, 3}, {3, 3, 3, 4, 1, 1}};
  const auto t = kruskal_wallis(ties);
  CHECK(t.statistic == Approx(4.2247058823529455).epsilon(1e-12));
  CHECK(t.p_value == Approx(0.12095303597376997).epsilon(1e-10));

  CHECK_THROWS_AS(kruskal_wallis(std::vector<std::vector<double>>{{1, 2}}), NumericError);
  CHECK_THROWS_AS(kruskal_wallis(std::vector<std::vector<double>>{{1, 2}, {}}), NumericError);
}

TEST_CASE("Kruskal-Wallis is rank invariant") {
  Rng rng(21);
  std::vector<std::vector<double>> groups(3);
  for (std::size_t g = 0; g < 3; ++g) {
    groups[g].resize(10 + g * 3);
    for (double& x : groups[g]) x = static_cast<double>(rng.below(6)) + static_cast<double>(g) * 0.5;
  }
  const double h = kruskal_wallis(groups).statistic;
  auto transformed = groups;
  for (auto& g : transformed)
    for (double& x : g) x = std::exp(x) * 3.0 + 1.0;
  CHECK(kruskal_wallis(transformed).statistic == Approx(h).epsilon(1e-12));
  auto shuffled = groups;
  for (auto& g : shuffled) std::reverse(g.begin(), g.end());
  CHECK(kruskal_wallis(shuffled).statistic == Approx(h).epsilon(1e-12));
}

TEST_CASE("Dunn post-hoc") {
  const std::vector<std::vector<double>> groups{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto r = dunn_posthoc(groups, Adjust::None);
  REQUIRE(r.pairs.size() == 3);
  // Independent oracle: mean-rank difference over tie-corrected pooled SE.
  CHECK(r.pairs[0].z == Approx(-1.3416407864998738).epsilon(1e-12));
  CHECK(r.pairs[1].z == Approx(-2.6832815729997477).epsilon(1e-12));
  CHECK(r.pairs[2].z == Approx(-1.3416407864998738).epsilon(1e-12));
  CHECK(r.pairs[1].p_raw == Approx(0.007290358091535638).epsilon(1e-10));
  const auto largest = std::max_element(r.pairs.begin(), r.pairs.end(), [](const auto& a, const auto& b) {
    return std::fabs(a.z) < std::fabs(b.z);
  });
  CHECK(largest->group_a == 0);
  CHECK(largest->group_b == 2);

  const auto bonf = dunn_posthoc(groups, Adjust::Bonferroni);
  for (const auto& p : bonf.pairs) CHECK(p.p_adjusted == Approx(std::min(1.0, 3 * p.p_raw)));

  const auto holm = dunn_posthoc(groups, Adjust::Holm);
  CHECK(holm.pairs[1].p_adjusted == Approx(3 * 0.007290358091535638));
  CHECK(holm.pairs[0].p_adjusted == Approx(std::min(1.0, 2 * 0.17971249487899976)));
  for (const auto& p : holm.pairs) CHECK(p.p_adjusted >= p.p_raw);

  const std::vector<std::vector<double>> ties{{1, 1, 1, 2, 2}, {2, 2, 3, 3}, {3, 3, 3, 4, 1, 1}};
  const auto t = dunn_posthoc(ties, Adjust::None);
  CHECK(t.pairs[0].z == Approx(-1.7289915455854266).epsilon(1e-12));
  CHECK(t.pairs[1].z == Approx(-1.8186790763869531).epsilon(1e-12));
  CHECK(t.pairs[2].z == Approx(0.09074852129730301).epsilon(1e-10));
}

TEST_CASE("Dunn on identical groups") {
  const std::vector<std::vector<double>> same{{1, 2, 3}, {1, 2, 3}};
  const auto r = dunn_posthoc(same, Adjust::Holm);
  CHECK(r.pairs[0].z == 0.0);
  CHECK(r.pairs[0].p_raw == 1.0);
  CHECK(r.pairs[0].p_adjusted == 1.0);
}

TEST_CASE("one-way ANOVA") {
  const std::vector<std::vector<double>> equal_means{{1, 2, 3}, {2, 1, 3}, {3, 2, 1}};
  CHECK(anova_f(equal_means).f == 0.0);
  CHECK(anova_f(equal_means).p_value == 1.0);

  // SSB = 16 on 1 df, SSW = 1 on 2 df: F = 16 / 0.5.
  const std::vector<std::vector<double>> two{{1, 2}, {5, 6}};
  const auto r = anova_f(two);
  CHECK(r.f == Approx(32.0).epsilon(1e-12));
  CHECK(r.df_between == 1);
  CHECK(r.df_within == 2);
  CHECK(r.p_value == Approx(0.02985749985466811).epsilon(1e-9));

  const std::vector<std::vector<double>> three{{1, 2, 3, 4}, {2, 4, 6, 9}, {10, 12, 11}};
  CHECK(anova_f(three).f == Approx(14.919865319865318).epsilon(1e-12));
  CHECK(anova_f(three).p_value == Approx(0.001997872656419772).epsilon(1e-9));

  const std::vector<std::vector<double>> separated{{1, 1}, {3, 3}};
  CHECK(std::isinf(anova_f(separated).f));
  CHECK(anova_f(separated).p_value == 0.0);

  CHECK_THROWS_AS(anova_f(std::vector<std::vector<double>>{{2, 2}, {2, 2}}), NumericError);
  CHECK_THROWS_AS(anova_f(std::vector<std::vector<double>>{{1}, {2}}), NumericError);
  CHECK_THROWS_AS(anova_f(std::vector<std::vector<double>>{{1, 2}}), NumericError);
}

TEST_CASE("tail probabilities against reference values") {
  CHECK(chi_squared_sf(7.2, 2) == Approx(0.027323722447292555).epsilon(1e-10));
  CHECK(chi_squared_sf(15.92, 2) == Approx(0.00034915311745982664).epsilon(1e-10));
  CHECK(chi_squared_sf(0.5, 1) == Approx(0.47950012218695337).epsilon(1e-10));
  CHECK(chi_squared_sf(30.0, 5) == Approx(1.4748581038443073e-05).epsilon(1e-10));
  CHECK(chi_squared_sf(3.0, 10) == Approx(0.9814240637778593).epsilon(1e-10));
  CHECK(f_sf(16, 1, 2) == Approx(0.057190958417936644).epsilon(1e-10));
  CHECK(f_sf(764.83, 2, 100) == Approx(2.4839892037337557e-61).epsilon(1e-10));
  CHECK(f_sf(1.5, 3, 20) == Approx(0.2450520115939673).epsilon(1e-10));
  CHECK(f_sf(0.2, 4, 7) == Approx(0.9305148174758058).epsilon(1e-10));
  CHECK(normal_two_sided_p(1.96) == Approx(0.04999579029644087).epsilon(1e-10));
  CHECK(normal_two_sided_p(-3.0) == Approx(0.0026997960632601866).epsilon(1e-10));
}

TEST_CASE("Cohen's kappa") {
  const std::vector<std::string> same{"a", "b", "c", "a"};
  const auto perfect = cohen_kappa(same, same);
  CHECK(perfect.kappa == 1.0);
  CHECK(perfect.accuracy == 1.0);

  const auto a = labels_from_counts(20, 5, 10, 15, true);
  const auto b = labels_from_counts(20, 5, 10, 15, false);
  const auto r = cohen_kappa(a, b);
  CHECK(r.accuracy == Approx(0.70).margin(1e-12));
  CHECK(r.kappa == Approx(0.40).margin(1e-12));
  CHECK(r.n == 50);

  const std::vector<std::string> constant(5, "z");
  CHECK(cohen_kappa(constant, constant).kappa == 1.0);

  CHECK_THROWS_AS(cohen_kappa(same, std::vector<std::string>{"a"}), NumericError);
}

TEST_CASE("Cohen's kappa is invariant under relabeling and near 0 for independent raters") {
  const auto a = labels_from_counts(20, 5, 10, 15, true);
  const auto b = labels_from_counts(20, 5, 10, 15, false);
  auto rename = [](std::vector<std::string> v) {
    for (auto& s : v) s = s == "x" ? "q" : "x";
    return v;
  };
  CHECK(cohen_kappa(rename(a), rename(b)).kappa == Approx(0.40).margin(1e-12));

  Rng rng(99);
  const std::size_t n = 40000;
  std::vector<std::string> ra(n), rb(n);
  const char* cats[] = {"p", "q", "r", "s"};
  for (std::size_t i = 0; i < n; ++i) {
    ra[i] = cats[rng.below(4)];
    rb[i] = cats[rng.below(4)];
  }
  CHECK(std::fabs(cohen_kappa(ra, rb).kappa) < 0.02);
}

TEST_CASE("cosine similarity") {
  const std::vector<double> v{0.3, 0.0, 1.2};
  CHECK(cosine_similarity(v, v) == Approx(1.0).margin(1e-15));
  CHECK(cosine_similarity(std::vector<double>{1, 0, 0}, std::vector<double>{0, 1, 0}) == 0.0);
  CHECK(cosine_similarity(std::vector<double>{1, 1, 0}, std::vector<double>{1, 0, 0}) ==
        Approx(0.7071067811865476).margin(1e-12));
  const std::vector<double> u{0.5, 2.0, 0.1};
  const std::vector<double> scaled{1.5, 6.0, 0.3};
  CHECK(cosine_similarity(scaled, v) == Approx(cosine_similarity(u, v)).margin(1e-12));
  CHECK(cosine_similarity(u, v) == cosine_similarity(v, u));
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 0}), NumericError);
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>{1}, std::vector<double>{1, 0}), NumericError);
}

TEST_CASE("adjusted Rand index") {
  const std::vector<int> a{0, 0, 1, 1, 2, 2, 2};
  const std::vector<int> b{0, 0, 1, 2, 2, 2, 1};
  CHECK(adjusted_rand_index(a, b) == Approx(0.2125).margin(1e-12));
  const std::vector<int> renamed{5, 5, 9, 9, 7, 7, 7};
  CHECK(adjusted_rand_index(a, renamed) == 1.0);
}

TEST_CASE("rng derived streams are stable") {
  CHECK(safecomb::derive_seed(1, "a") != safecomb::derive_seed(1, "b"));
  CHECK(safecomb::derive_seed(1, "a") != safecomb::derive_seed(2, "a"));
  Rng r1(5), r2(5);
  for (int i = 0; i < 100; ++i) CHECK(r1.next() == r2.next());
  Rng r(6);
  std::array<int, 7> hist{};
  for (int i = 0; i < 70000; ++i) ++hist[r.below(7)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::fabs(sum / 100000) < 0.02);
  CHECK(std::fabs(sq / 100000 - 1.0) < 0.02);
}
