// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <unistd.h>

#include "safecomb/error.hpp"
#include "safecomb/pipeline/pipeline.hpp"
#include "safecomb/report/report.hpp"
#include "safecomb/synthgen/generator.hpp"

using namespace safecomb;
using namespace safecomb::pipeline;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("safecomb_pipeline_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small_run(const fs::path& dir) {
  synthgen::GeneratorSpec spec;
  spec.seed = 3;
  for (const char* name : {"IAP", "NP", "AA", "CE"})
    spec.patterns.push_back({name, 300, synthgen::default_prototype(name), {}});
  spec.uniform_noise = 100;
  spec.accounts = 30;
  spec.effects.push_back({"AA", corpus::FeatureVector{corpus::Category::Humor}, corpus::Indicator::Likes, 1.0,
                          std::nullopt});
  const auto g = synthgen::generate(spec);
  corpus::write_corpus(dir / "corpus.jsonl", corpus::Format::Jsonl, g.records);
  RunConfig c;
  c.input = dir / "corpus.jsonl";
  c.seed = 11;
  c.cluster.min_cluster_size = 20;
  c.cluster.min_samples = 5;
  c.synergy.min_n = 30;
  c.synergy.k_max = 2;
  c.synergy.bootstrap.resamples = 100;
  c.tiers.rescale_min_n = true;
  return c;
}

}  // namespace

TEST_CASE("config JSON merges onto defaults") {
  const json j{{"seed", 5},
               {"cluster", {{"min_samples", 7}, {"stability_repeats", 3}}},
               {"synergy", {{"k_max", 3}, {"indicators", {"shares"}}, {"without", "none"}}},
               {"baselines", {{{"name", "IAP"}, {"required", json::array({json::array({"Exp", "OffM"}), json::array({"ExpEv", "StatEv"})})}}}},
               {"tiers", {{"adjust", "bonferroni"}}}};
  const auto c = config_from_json(j);
  CHECK(*c.seed == 5);
  CHECK(c.cluster.min_samples == 7);
  CHECK(c.cluster.min_cluster_size == 100);
  CHECK(c.stability_repeats == 3);
  CHECK(c.synergy.k_max == 3);
  CHECK(c.synergy.without == synergy::WithoutRule::None);
  REQUIRE(c.indicators.size() == 1);
  CHECK(c.baselines.size() == 4);
  CHECK(c.baselines[0].required[1].size() == 2);
  CHECK(c.tiers.adjust == stats::Adjust::Bonferroni);

  CHECK_THROWS_AS(config_from_json(json{{"sede", 1}}), UsageError);
  CHECK_THROWS_AS(config_from_json(json{{"cluster", {{"min_size", 1}}}}), UsageError);
  CHECK_THROWS_AS(config_from_json(json{{"synergy", {{"without", "all"}}}}), UsageError);

  const auto only = config_from_json(json{{"synergy", {{"only", {"CE"}}}}});
  REQUIRE(only.baselines.size() == 1);
  CHECK(only.baselines[0].name == "CE");
}

TEST_CASE("config validation names the field") {
  RunConfig c;
  c.output_dir = "x";
  c.seed = 1;
  c.input = "/definitely/not/here.jsonl";
  try {
    c.validate();
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).rfind("input:", 0) == 0);
  }
  const auto dir = scratch("validation");
  c.input = dir;
  c.seed.reset();
  try {
    c.validate();
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).rfind("seed:", 0) == 0);
  }
}

TEST_CASE("paper defaults") {
  RunConfig c;
  c.synergy.k_max = 2;
  c.synergy.min_n = 5;
  apply_paper_defaults(c);
  CHECK(c.synergy.k_max == 4);
  CHECK(c.synergy.min_n == 300);
  CHECK(c.synergy.bootstrap.resamples == 500);
  CHECK(c.synergy.bootstrap.level == 0.95);
}

TEST_CASE("pipeline bundle is complete and rerun-identical") {
  const auto dir = scratch("bundle");
  auto c = small_run(dir);
  c.output_dir = dir / "a";
  c.workers = 1;
  const auto out_a = run_pipeline(c);
  c.output_dir = dir / "b";
  c.workers = 4;
  const auto out_b = run_pipeline(c);
  const std::vector<std::string> expected{"parse_report.json",      "cluster_model.json",  "assignments.csv",
                                          "clusters.csv",           "pattern_assignment.csv", "similarity.csv",
                                          "similarity_pairs.csv",   "similarity_summary.json", "effects.csv",
                                          "table4.csv",             "figure5.csv",          "complexity.csv",
                                          "tier_summary.json",      "tier_effects.csv",     "tier_complexity.csv",
                                          "tier_tests.json",        "manifest.json"};
  CHECK(out_a.files == expected);
  CHECK(out_b.files == expected);
  for (const auto& f : expected) {
    if (f == "manifest.json") continue;
    INFO(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  auto ma = json::parse(slurp(dir / "a" / "manifest.json"));
  auto mb = json::parse(slurp(dir / "b" / "manifest.json"));
  CHECK(ma["runtime"]["workers"] == 1);
  CHECK(ma["input"]["sha256"].get<std::string>().size() == 64);
  CHECK(ma["outputs"].size() == expected.size() - 1);
  ma.erase("runtime");
  mb.erase("runtime");
  CHECK(ma == mb);
}

TEST_CASE("a failing stage keeps earlier outputs") {
  const auto dir = scratch("failing");
  {
    std::ofstream bad(dir / "bad.jsonl");
    bad << "{\"id\": \"1\"}\nnot json\n";
  }
  RunConfig c;
  c.input = dir / "bad.jsonl";
  c.seed = 1;
  c.output_dir = dir / "out";
  try {
    run_pipeline(c);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind("ingest:", 0) == 0);
  }
  CHECK(fs::exists(dir / "out" / "parse_report.json"));
}

TEST_CASE("agreement") {
  const auto dir = scratch("agreement");
  auto c = small_run(dir);
  const auto records = corpus::read_corpus(c.input, corpus::Format::Jsonl).records;
  const auto self = agreement(records, records);
  CHECK(self.pooled.kappa == 1.0);
  for (const auto& [name, r] : self.per_dimension) CHECK(r.kappa == 1.0);
  CHECK(AgreementReport::headline({0.78, 0.835, 10}) == "κ = 0.78; accuracy ≈ 83.5%");

  auto other = records;
  other.back().id = "different";
  CHECK_THROWS_AS(agreement(records, other), DataError);
  other = records;
  other.pop_back();
  CHECK_THROWS_AS(agreement(records, other), DataError);
}

TEST_CASE("report number formatting") {
  CHECK(report::number(0.1) == "0.1");
  CHECK(std::stod(report::number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(report::fixed(-0.0004, 3) == "0.000");
  CHECK(report::fixed(-0.0006, 3) == "-0.001");
  CHECK(report::p_value(0.38) == "0.38");
  CHECK(report::p_value(0.0304) == "0.03");
  CHECK(report::p_value(0.004) == "0.004");
  CHECK(report::p_value(0.0) == "0.000");

  std::ostringstream out;
  report::write_csv(out, report::Table{{"a", "b"}, {{"x,y", "say \"hi\""}}});
  CHECK(out.str() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
  CHECK_THROWS_AS(report::write_csv(out, report::Table{{"a"}, {{"1", "2"}}}), NumericError);
}

TEST_CASE("tier complexity table shape") {
  tiers::PerTier<std::vector<synergy::CombinationEffect>> e;
  auto add = [&](std::size_t t, int k) {
    synergy::CombinationEffect x;
    const corpus::Category pool[] = {corpus::Category::Sex, corpus::Category::Fear, corpus::Category::Humor};
    for (int i = 0; i < k; ++i) x.combination.set(pool[i]);
    x.significant = true;
    e[t].push_back(x);
  };
  for (int k : {1, 1, 2}) add(0, k);
  for (int k : {2, 2, 3}) add(1, k);
  const auto c = tiers::complexity_comparison(e);
  const auto t = report::tier_complexity_table(c);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0][0] == "Top");
  CHECK(t.rows[0][6].rfind("Top-Middle: ", 0) == 0);
  CHECK(t.rows[1][6] == "—");
  CHECK(t.rows[2][1] == "0");
  CHECK(t.rows[2][2].empty());
  CHECK(t.rows[2][6] == "—");
}
