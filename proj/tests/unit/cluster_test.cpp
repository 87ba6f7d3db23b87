// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "safecomb/cluster/hdbscan.hpp"
#include "safecomb/cluster/model_io.hpp"
#include "safecomb/error.hpp"
#include "safecomb/rng.hpp"
#include "safecomb/stats/stats.hpp"
#include "safecomb/synthgen/perturb.hpp"

using namespace safecomb;
using namespace safecomb::cluster;
using corpus::Category;
using C = Category;

namespace {

const FeatureVector kExpertValue{C::Exp, C::Valu, C::Gain, C::ExpEv};
const FeatureVector kValueAssertive{C::NoSrc, C::Valu, C::Gain, C::NoEv};

struct Planted {
  std::vector<FeatureVector> vectors;
  std::vector<int> truth;  // -1 for uniform records
};

Planted two_prototypes(std::uint64_t seed, int copies = 200, int uniform = 20) {
  Rng rng(seed);
  Planted out;
  const FeatureVector protos[] = {kExpertValue, kValueAssertive};
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < copies; ++i) {
      out.vectors.push_back(synthgen::perturb(protos[c], 0.05, rng));
      out.truth.push_back(c);
    }
  for (int i = 0; i < uniform; ++i) {
    out.vectors.push_back(synthgen::uniform_vector(rng));
    out.truth.push_back(-1);
  }
  return out;
}

ClusterParams small_params() {
  ClusterParams p;
  p.min_cluster_size = 20;
  p.min_samples = 5;
  p.seed = 7;
  return p;
}

}  // namespace

TEST_CASE("point mass is one cluster without noise") {
  std::vector<FeatureVector> v(200, kExpertValue);
  ClusterParams p;
  p.min_cluster_size = 10;
  p.min_samples = 5;
  ClusterModel model;
  const auto a = fit_predict(v, p, &model);
  CHECK(a.cluster_count() == 1);
  CHECK(a.noise_count() == 0);
  REQUIRE(model.clusters.size() == 1);
  CHECK(model.clusters[0].size == 200);
  CHECK(model.clusters[0].exemplars == std::vector<FeatureVector>{kExpertValue});
  for (double s : a.strengths) CHECK(s == 1.0);
}

// Reference HDBSCAN (scikit-learn 1.x, same vectors, min_cluster_size=20,
// min_samples=5) ARI against the planted labels, uniform records as one class.
TEST_CASE("two planted prototypes are recovered") {
  const std::pair<std::uint64_t, double> reference[] = {
      {11, 0.6123878653083542}, {12, 0.5578640814751392}, {13, 0.6874818816316205}, {14, 0.6028577658743209},
      {15, 0.5989337331093134}, {16, 0.6036912113251037}, {17, 0.6041456937350974}, {18, 0.5504718020709755}};
  for (const auto& [seed, reference_ari] : reference) {
    CAPTURE(seed);
    const Planted data = two_prototypes(seed);
    ClusterModel model;
    const auto a = fit_predict(data.vectors, small_params(), &model);
    CHECK(a.cluster_count() >= 2);
    CHECK(stats::adjusted_rand_index(data.truth, a.labels) >= reference_ari);

    const auto protos = approximate_predict(model, std::vector<FeatureVector>{kExpertValue, kValueAssertive});
    CHECK(protos.labels[0] != kNoise);
    CHECK(protos.labels[1] != kNoise);
    CHECK(protos.labels[0] != protos.labels[1]);

    std::size_t uniform_noise = 0;
    for (std::size_t i = 0; i < data.truth.size(); ++i)
      if (data.truth[i] < 0 && a.labels[i] == kNoise) ++uniform_noise;
    CHECK(uniform_noise * 2 > 20);
    for (const auto& c : model.clusters) CHECK(c.size >= 20);
  }
}

TEST_CASE("prediction on the fitted sample reproduces fit labels") {
  const Planted data = two_prototypes(12);
  ClusterModel model = fit(data.vectors, small_params());
  const auto a = approximate_predict(model, data.vectors);
  CHECK(a.labels == model.fitted_labels());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.strengths[i] >= 0.0);
    CHECK(a.strengths[i] <= 1.0);
  }
}

TEST_CASE("exemplars predict to their own cluster at full strength") {
  const Planted data = two_prototypes(13);
  const ClusterModel model = fit(data.vectors, small_params());
  for (const auto& c : model.clusters) {
    REQUIRE_FALSE(c.exemplars.empty());
    const auto a = approximate_predict(model, c.exemplars);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.labels[i] == c.label);
      CHECK(a.strengths[i] == 1.0);
    }
  }
}

TEST_CASE("a vector far from both prototypes is noise") {
  const Planted data = two_prototypes(14);
  const ClusterModel model = fit(data.vectors, small_params());
  const std::vector<FeatureVector> far{FeatureVector{C::OffM, C::Fear, C::Humor, C::Loss, C::StatEv, C::CausEv}};
  CHECK(approximate_predict(model, far).labels[0] == kNoise);
}

TEST_CASE("unseen vector next to a prototype joins its cluster") {
  const Planted data = two_prototypes(15);
  const ClusterModel model = fit(data.vectors, small_params());
  const int home = approximate_predict(model, std::vector<FeatureVector>{kValueAssertive}).labels[0];
  REQUIRE(home != kNoise);
  // Value assertive with an added composite appeal; absent from this corpus.
  FeatureVector near = kValueAssertive;
  near.set(C::Comp);
  near.set(C::Met);
  const auto a = approximate_predict(model, std::vector<FeatureVector>{near});
  if (std::find(data.vectors.begin(), data.vectors.end(), near) == data.vectors.end()) {
    CHECK(a.labels[0] == home);
    CHECK(a.strengths[0] > 0.0);
    CHECK(a.strengths[0] <= 1.0);
  }
}

TEST_CASE("labels are equivariant under input permutation") {
  Planted data = two_prototypes(16);
  const auto base = fit_predict(data.vectors, small_params()).labels;
  std::vector<std::size_t> order(data.vectors.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(99);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  std::vector<FeatureVector> shuffled;
  for (std::size_t i : order) shuffled.push_back(data.vectors[i]);
  const auto permuted = fit_predict(shuffled, small_params()).labels;
  std::vector<int> expected;
  for (std::size_t i : order) expected.push_back(base[i]);
  CHECK(stats::adjusted_rand_index(expected, permuted) == Catch::Approx(1.0));
  // Labels are ordered by member vectors, so even the ids agree.
  CHECK(expected == permuted);
}

TEST_CASE("worker count does not change the result") {
  const Planted data = two_prototypes(17, 400, 60);
  ClusterParams p = small_params();
  p.workers = 1;
  const auto one = fit_predict(data.vectors, p);
  p.workers = 8;
  const auto eight = fit_predict(data.vectors, p);
  CHECK(one.labels == eight.labels);
  CHECK(one.strengths == eight.strengths);
}

TEST_CASE("collapsing duplicates gives the expanded partition") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const Planted data = two_prototypes(seed, 120, 15);
    ClusterParams p = small_params();
    const auto collapsed = fit_predict(data.vectors, p);
    p.collapse_duplicates = false;
    ClusterModel expanded_model;
    const auto expanded = fit_predict(data.vectors, p, &expanded_model);
    CHECK(collapsed.labels == expanded.labels);
    CHECK(collapsed.strengths == expanded.strengths);
    CHECK(expanded_model.points.size() == data.vectors.size());
  }
}

TEST_CASE("condensed tree lambdas grow away from the root") {
  const Planted data = two_prototypes(18);
  const ClusterModel model = fit(data.vectors, small_params());
  std::vector<double> birth(model.tree.size() + model.points.size() + 1, 0.0);
  for (const auto& row : model.tree) {
    CHECK(row.lambda >= 0.0);
    if (row.child >= model.root_node) birth.at(row.child) = row.lambda;
  }
  for (const auto& row : model.tree) CHECK(row.lambda >= birth.at(row.parent));
  for (const auto& c : model.clusters) {
    CHECK(c.lambda_death >= c.lambda_birth);
    CHECK(c.size >= static_cast<std::size_t>(model.params.min_cluster_size));
  }
}

TEST_CASE("subsample fit predicts the whole corpus") {
  const Planted data = two_prototypes(19, 400, 40);
  ClusterParams p = small_params();
  p.subsample_size = 300;
  ClusterModel model;
  const auto a = fit_predict(data.vectors, p, &model);
  CHECK(model.fitted_indices.size() == 300);
  CHECK(std::is_sorted(model.fitted_indices.begin(), model.fitted_indices.end()));
  CHECK(a.size() == data.vectors.size());
  CHECK(stats::adjusted_rand_index(data.truth, a.labels) >= 0.6);
}

TEST_CASE("subsample stability") {
  const Planted data = two_prototypes(20, 400, 40);
  ClusterParams p = small_params();
  p.subsample_size = 300;

  const std::uint64_t same[] = {5, 5};
  const auto identical = subsample_stability(data.vectors, p, same);
  CHECK(identical.mean_ari == 1.0);

  const auto report = subsample_stability(data.vectors, p, 5);
  CHECK(report.seeds.size() == 5);
  CHECK(report.ari.size() == 5);
  CHECK(report.mean_ari >= 0.8);
  CHECK(report.evaluation_size == data.vectors.size());

  CHECK_THROWS_AS(subsample_stability(data.vectors, p, 1), UsageError);
}

TEST_CASE("pure uniform corpus runs without error") {
  Rng rng(3);
  std::vector<FeatureVector> v;
  for (int i = 0; i < 400; ++i) v.push_back(synthgen::uniform_vector(rng));
  ClusterParams p = small_params();
  p.subsample_size = 250;
  const auto report = subsample_stability(v, p, 3);
  CHECK(report.ari.size() == 3);
  CHECK(std::isfinite(report.mean_ari));
}

TEST_CASE("model file round trip") {
  const Planted data = two_prototypes(24);
  const ClusterModel model = fit(data.vectors, small_params());
  const auto path = std::filesystem::temp_directory_path() / "safecomb_cluster_model_test.json";
  save_model(path, model);
  const ClusterModel loaded = load_model(path);
  std::filesystem::remove(path);
  CHECK(loaded.fitted_labels() == model.fitted_labels());
  CHECK(approximate_predict(loaded, data.vectors).labels == approximate_predict(model, data.vectors).labels);
  CHECK(model_to_json(loaded) == model_to_json(model));

  auto bad = model_to_json(model);
  bad["version"] = 99;
  CHECK_THROWS_AS(model_from_json(bad), DataError);
  bad["format"] = "other";
  CHECK_THROWS_AS(model_from_json(bad), DataError);
}

TEST_CASE("parameter and input validation") {
  ClusterParams p;
  p.min_cluster_size = 1;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = {};
  p.min_samples = 0;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = {};
  p.distance_floor = 0.0;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = {};
  std::vector<FeatureVector> tiny(50, kExpertValue);
  CHECK_THROWS_AS(fit(tiny, p), DataError);
  CHECK_THROWS_AS(approximate_predict(ClusterModel{}, tiny), UsageError);
  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"bogus", 1}}), UsageError);
  CHECK(params_to_json(params_from_json(params_to_json(small_params()))) == params_to_json(small_params()));
}
