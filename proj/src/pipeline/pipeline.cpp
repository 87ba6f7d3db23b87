// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/pipeline/pipeline.hpp"

#include <boost/version.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <set>

#include "safecomb/cluster/model_io.hpp"
#include "safecomb/report/report.hpp"

#ifndef SAFECOMB_VERSION
#define SAFECOMB_VERSION "0.0.0"
#endif

namespace safecomb::pipeline {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, unused] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw UsageError("unknown key '" + key + "' in " + where);
}

std::string without_rule_name(synergy::WithoutRule r) {
  return r == synergy::WithoutRule::Complement ? "complement" : "none";
}

synergy::WithoutRule parse_without_rule(const std::string& s) {
  if (s == "complement") return synergy::WithoutRule::Complement;
  if (s == "none") return synergy::WithoutRule::None;
  throw UsageError("synergy.without must be 'complement' or 'none', got '" + s + "'");
}

std::vector<std::string> baseline_names(const RunConfig& config) {
  std::vector<std::string> names;
  for (const auto& b : config.baselines) names.push_back(b.name);
  return names;
}

void emit_csv(const RunConfig& config, StageOutputs& out, const std::string& name, const report::Table& table) {
  report::write_csv(config.output_dir / name, table);
  out.files.push_back(name);
}

void emit_json(const RunConfig& config, StageOutputs& out, const std::string& name, const json& j) {
  report::write_json(config.output_dir / name, j);
  out.files.push_back(name);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t stage_seed(const RunConfig& config) {
  if (!config.seed) throw UsageError("seed: required for clustering and bootstrap stages");
  return *config.seed;
}

}  // namespace

void RunConfig::validate() const {
  if (input.empty()) throw UsageError("input: no input path given");
  if (!fs::exists(input)) throw UsageError("input: path does not exist: " + input.string());
  if (output_dir.empty()) throw UsageError("output_dir: no output directory given");
  if (!seed) throw UsageError("seed: required for clustering and bootstrap stages");
  try {
    cluster.validate();
  } catch (const UsageError& e) {
    throw UsageError(std::string("cluster: ") + e.what());
  }
  if (stability_repeats < 0 || stability_repeats == 1)
    throw UsageError("cluster.stability_repeats: must be 0 or at least 2");
  try {
    patterns.validate();
  } catch (const UsageError& e) {
    throw UsageError(std::string("patterns: ") + e.what());
  }
  if (!(dominance_threshold > 0.0 && dominance_threshold <= 1.0))
    throw UsageError("patterns.dominance_threshold: must lie in (0, 1]");
  if (baselines.empty()) throw UsageError("baselines: at least one baseline is required");
  std::set<std::string> names;
  for (const auto& b : baselines)
    if (!names.insert(b.name).second) throw UsageError("baselines: duplicate name " + b.name);
  if (indicators.empty()) throw UsageError("synergy.indicators: at least one indicator is required");
  if (synergy.k_max < 1) throw UsageError("synergy.k_max: must be at least 1");
  if (synergy.bootstrap.resamples < 1) throw UsageError("synergy.resamples: must be at least 1");
  if (!(synergy.bootstrap.level > 0.0 && synergy.bootstrap.level < 1.0))
    throw UsageError("synergy.level: must lie in (0, 1)");
  if (!(synergy.combination_cap >= 1.0)) throw UsageError("synergy.combination_cap: must be at least 1");
  if (table_rows < 1) throw UsageError("report.table_rows: must be at least 1");
}

RunConfig config_from_json(const json& j, RunConfig c) {
  reject_unknown(j,
                 {"input", "format", "lenient", "seed", "output_dir", "workers", "cluster", "patterns", "baselines",
                  "synergy", "tiers", "report"},
                 "config");
  try {
    if (j.contains("input")) c.input = j.at("input").get<std::string>();
    if (j.contains("format")) c.format = corpus::parse_format(j.at("format").get<std::string>());
    if (j.contains("lenient")) c.lenient = j.at("lenient").get<bool>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
    if (j.contains("cluster")) {
      json params = cluster::params_to_json(c.cluster);
      json given = j.at("cluster");
      reject_unknown(given,
                     {"min_cluster_size", "min_samples", "metric", "subsample_size", "distance_floor",
                      "collapse_duplicates", "stability_repeats"},
                     "cluster");
      if (given.contains("stability_repeats")) {
        c.stability_repeats = given.at("stability_repeats").get<int>();
        given.erase("stability_repeats");
      }
      params.update(given);
      const unsigned workers = c.cluster.workers;
      c.cluster = cluster::params_from_json(params);
      c.cluster.workers = workers;
    }
    if (j.contains("patterns")) {
      json given = j.at("patterns");
      reject_unknown(given, {"patterns", "overrides", "dominance_threshold", "pair_threshold"}, "patterns");
      if (given.contains("dominance_threshold")) c.dominance_threshold = given.at("dominance_threshold").get<double>();
      if (given.contains("pair_threshold")) c.pair_threshold = given.at("pair_threshold").get<double>();
      given.erase("dominance_threshold");
      given.erase("pair_threshold");
      if (!given.empty()) {
        json merged = patterns::pattern_config_to_json(c.patterns);
        merged.update(given);
        c.patterns = patterns::pattern_config_from_json(merged);
      }
    }
    if (j.contains("baselines")) {
      for (const auto& bj : j.at("baselines")) {
        auto b = synergy::baseline_from_json(bj);
        auto it = std::find_if(c.baselines.begin(), c.baselines.end(), [&](const auto& x) { return x.name == b.name; });
        if (it != c.baselines.end()) *it = std::move(b);
        else c.baselines.push_back(std::move(b));
      }
    }
    if (j.contains("synergy")) {
      const auto& s = j.at("synergy");
      reject_unknown(s,
                     {"k_max", "min_n", "resamples", "level", "without", "bootstrap_all", "combination_cap",
                      "indicators", "only"},
                     "synergy");
      if (s.contains("k_max")) c.synergy.k_max = s.at("k_max").get<int>();
      if (s.contains("min_n")) c.synergy.min_n = s.at("min_n").get<std::size_t>();
      if (s.contains("resamples")) c.synergy.bootstrap.resamples = s.at("resamples").get<int>();
      if (s.contains("level")) c.synergy.bootstrap.level = s.at("level").get<double>();
      if (s.contains("without")) c.synergy.without = parse_without_rule(s.at("without").get<std::string>());
      if (s.contains("bootstrap_all")) c.synergy.bootstrap_all = s.at("bootstrap_all").get<bool>();
      if (s.contains("combination_cap")) c.synergy.combination_cap = s.at("combination_cap").get<double>();
      if (s.contains("indicators")) {
        c.indicators.clear();
        for (const auto& i : s.at("indicators")) c.indicators.push_back(corpus::parse_indicator(i.get<std::string>()));
      }
      if (s.contains("only")) {
        // Restrict the run to the named baselines.
        std::vector<synergy::BaselinePredicate> kept;
        for (const auto& name : s.at("only")) kept.push_back(synergy::find_baseline(c.baselines, name.get<std::string>()));
        c.baselines = std::move(kept);
      }
    }
    if (j.contains("tiers")) {
      const auto& t = j.at("tiers");
      reject_unknown(t, {"enabled", "rescale_min_n", "adjust"}, "tiers");
      if (t.contains("enabled")) c.tiers.enabled = t.at("enabled").get<bool>();
      if (t.contains("rescale_min_n")) c.tiers.rescale_min_n = t.at("rescale_min_n").get<bool>();
      if (t.contains("adjust")) c.tiers.adjust = stats::parse_adjust(t.at("adjust").get<std::string>());
    }
    if (j.contains("report")) {
      const auto& r = j.at("report");
      reject_unknown(r, {"table_rows"}, "report");
      if (r.contains("table_rows")) c.table_rows = r.at("table_rows").get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

json config_to_json(const RunConfig& c) {
  json j;
  j["input"] = c.input.string();
  j["format"] = c.format ? (*c.format == corpus::Format::Csv ? "csv" : "jsonl") : "auto";
  j["lenient"] = c.lenient;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["cluster"] = cluster::params_to_json(c.cluster);
  j["cluster"]["stability_repeats"] = c.stability_repeats;
  j["patterns"] = patterns::pattern_config_to_json(c.patterns);
  j["patterns"]["dominance_threshold"] = c.dominance_threshold;
  j["patterns"]["pair_threshold"] = c.pair_threshold;
  j["baselines"] = json::array();
  for (const auto& b : c.baselines) j["baselines"].push_back(synergy::baseline_to_json(b));
  json indicators = json::array();
  for (auto i : c.indicators) indicators.push_back(std::string(corpus::indicator_name(i)));
  j["synergy"] = {{"k_max", c.synergy.k_max},
                  {"min_n", c.synergy.min_n},
                  {"resamples", c.synergy.bootstrap.resamples},
                  {"level", c.synergy.bootstrap.level},
                  {"without", without_rule_name(c.synergy.without)},
                  {"bootstrap_all", c.synergy.bootstrap_all},
                  {"combination_cap", c.synergy.combination_cap},
                  {"indicators", indicators}};
  j["tiers"] = {{"enabled", c.tiers.enabled},
                {"rescale_min_n", c.tiers.rescale_min_n},
                {"adjust", stats::adjust_name(c.tiers.adjust)},
                {"cuts", {50, 90}}};
  j["report"] = {{"table_rows", c.table_rows}};
  return j;
}

void apply_paper_defaults(RunConfig& c) {
  c.synergy.bootstrap.resamples = 500;
  c.synergy.bootstrap.level = 0.95;
  c.synergy.min_n = 300;
  c.synergy.k_max = 4;
}

corpus::Corpus ingest(const RunConfig& config, StageOutputs& out) {
  return run_stage("ingest", [&] {
    const auto format = config.format.value_or(corpus::format_from_path(config.input));
    auto c = corpus::read_corpus(config.input, format, corpus::ReadOptions{config.lenient});
    c.report.source = config.input.filename().string();
    emit_json(config, out, "parse_report.json", c.report.to_json());
    if (c.records.empty()) throw DataError("no valid records in " + config.input.string());
    if (c.report.rejected > 0)
      out.warnings.push_back(std::to_string(c.report.rejected) + " rows rejected; see parse_report.json");
    return c;
  });
}

ClusterStage cluster_stage(const RunConfig& config, const corpus::Corpus& corpus, StageOutputs& out) {
  return run_stage("cluster", [&] {
    std::vector<corpus::FeatureVector> vectors;
    for (const auto& r : corpus.records) vectors.push_back(r.labels);
    auto params = config.cluster;
    params.seed = stage_seed(config);
    params.workers = config.workers;
    ClusterStage s;
    s.assignment = cluster::fit_predict(vectors, params, &s.model);
    cluster::save_model(config.output_dir / "cluster_model.json", s.model);
    out.files.push_back("cluster_model.json");
    emit_csv(config, out, "assignments.csv", report::assignments_table(corpus.records, s.assignment));
    if (config.stability_repeats > 0) {
      const auto st = cluster::subsample_stability(vectors, params, config.stability_repeats);
      emit_json(config, out, "stability.json",
                {{"seeds", st.seeds},
                 {"cluster_counts", st.cluster_counts},
                 {"noise_fractions", st.noise_fractions},
                 {"ari", st.ari},
                 {"mean_ari", st.mean_ari},
                 {"evaluation_size", st.evaluation_size}});
    }
    if (s.assignment.cluster_count() == 0) out.warnings.push_back("clustering labelled every record as noise");
    return s;
  });
}

PatternStage pattern_stage(const RunConfig& config, const corpus::Corpus& corpus, const cluster::ClusterAssignment& a,
                           StageOutputs& out) {
  return run_stage("patterns", [&] {
    std::vector<corpus::FeatureVector> vectors;
    for (const auto& r : corpus.records) vectors.push_back(r.labels);
    PatternStage s;
    s.profiles = patterns::profile_clusters(a, vectors, config.dominance_threshold);
    s.map = patterns::assign_patterns(s.profiles, config.patterns);
    s.similarity = patterns::similarity_report(s.profiles, s.map, config.patterns, config.pair_threshold);
    emit_csv(config, out, "clusters.csv", report::clusters_table(s.profiles, s.map));
    emit_csv(config, out, "pattern_assignment.csv", report::pattern_assignment_table(s.map));
    emit_csv(config, out, "similarity.csv", report::similarity_table(s.similarity));
    emit_csv(config, out, "similarity_pairs.csv", report::similarity_pairs_table(s.similarity));
    emit_json(config, out, "similarity_summary.json", patterns::similarity_summary_json(s.similarity));
    out.warnings.insert(out.warnings.end(), s.map.warnings.begin(), s.map.warnings.end());
    return s;
  });
}

std::vector<synergy::SweepResult> synergy_stage(const RunConfig& config, const corpus::Corpus& corpus,
                                                StageOutputs& out) {
  return run_stage("synergy", [&] {
    const auto table = synergy::EngagementTable::from_records(corpus.records);
    auto params = config.synergy;
    params.bootstrap.seed = stage_seed(config);
    params.workers = config.workers;
    std::vector<synergy::SweepResult> results;
    std::vector<synergy::CombinationEffect> all;
    for (const auto& b : config.baselines) {
      auto r = synergy::sweep(table, b, config.indicators, params);
      for (const auto& w : r.warnings) out.warnings.push_back(b.name + ": " + w);
      all.insert(all.end(), r.effects.begin(), r.effects.end());
      results.push_back(std::move(r));
    }
    const auto names = baseline_names(config);
    const auto curve = synergy::complexity_curve(all);
    out.warnings.insert(out.warnings.end(), curve.warnings.begin(), curve.warnings.end());
    emit_csv(config, out, "effects.csv", report::effects_table(all));
    emit_csv(config, out, "table4.csv", report::table4(all, names, config.table_rows));
    emit_csv(config, out, "figure5.csv", report::figure5_table(all));
    emit_csv(config, out, "complexity.csv", report::complexity_table(curve));
    return results;
  });
}

void tier_stage(const RunConfig& config, const corpus::Corpus& corpus, StageOutputs& out) {
  run_stage("tiers", [&] {
    std::vector<std::string> warnings;
    const auto followers = tiers::account_followers(corpus.records, &warnings);
    const auto partition = tiers::assign_tiers(followers);
    tiers::TierSweepParams params;
    params.synergy = config.synergy;
    params.synergy.bootstrap.seed = stage_seed(config);
    params.synergy.workers = config.workers;
    params.rescale_min_n = config.tiers.rescale_min_n;
    const auto sweep = tiers::tier_sweep(corpus.records, partition, config.baselines, config.indicators, params);

    tiers::TierComplexity complexity;
    bool any = false;
    for (auto t : tiers::kTiers)
      for (const auto& e : sweep.effects(t)) any = any || e.significant;
    if (any) complexity = tiers::complexity_comparison(sweep, config.tiers.adjust);
    else complexity.warnings.push_back("no tier has a significant combination; tests skipped");

    auto summary = report::tier_summary_json(partition, sweep);
    for (const auto& w : warnings) summary["warnings"].push_back(w);
    emit_json(config, out, "tier_summary.json", summary);
    emit_csv(config, out, "tier_effects.csv", report::tier_effects_table(sweep, baseline_names(config), config.table_rows));
    emit_csv(config, out, "tier_complexity.csv", report::tier_complexity_table(complexity));
    emit_json(config, out, "tier_tests.json", report::tier_tests_json(complexity));
    for (const auto& w : summary["warnings"]) out.warnings.push_back("tiers: " + w.get<std::string>());
    for (const auto& w : complexity.warnings) out.warnings.push_back("tiers: " + w);
    return 0;
  });
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericError("SHA-256 initialisation failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

json build_manifest(const RunConfig& config, const corpus::Corpus& corpus, const StageOutputs& out,
                    const json& runtime) {
  json j;
  j["format"] = "safecomb-manifest";
  j["version"] = 1;
  j["tool"] = {{"name", "safecomb"}, {"version", SAFECOMB_VERSION}};
  j["libraries"] = {{"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                    {"boost", BOOST_LIB_VERSION},
                    {"openssl", OPENSSL_VERSION_TEXT}};
  j["seed"] = config.seed ? json(*config.seed) : json(nullptr);
  j["config"] = config_to_json(config);
  j["input"] = {{"path", config.input.string()},
                {"sha256", sha256_file(config.input)},
                {"bytes", fs::file_size(config.input)},
                {"records_accepted", corpus.report.accepted},
                {"records_rejected", corpus.report.rejected}};
  j["outputs"] = json::object();
  for (const auto& f : out.files) j["outputs"][f] = sha256_file(config.output_dir / f);
  j["warnings"] = out.warnings;
  j["runtime"] = runtime;
  return j;
}

StageOutputs run_pipeline(const RunConfig& config, const Logger& log) {
  run_stage("config", [&] {
    config.validate();
    return 0;
  });
  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_now();
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw UsageError("output_dir: cannot create " + config.output_dir.string() + ": " + ec.message());

  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  StageOutputs out;
  const auto corpus = ingest(config, out);
  say("ingest: " + std::to_string(corpus.records.size()) + " records");
  const auto clustered = cluster_stage(config, corpus, out);
  say("cluster: " + std::to_string(clustered.assignment.cluster_count()) + " clusters, " +
      std::to_string(clustered.assignment.noise_count()) + " noise");
  if (clustered.assignment.cluster_count() > 0) {
    const auto p = pattern_stage(config, corpus, clustered.assignment, out);
    say("patterns: " + std::to_string(p.profiles.size()) + " profiled clusters");
  } else {
    out.warnings.push_back("patterns: skipped, no clusters");
  }
  const auto sweeps = synergy_stage(config, corpus, out);
  std::size_t significant = 0;
  for (const auto& s : sweeps)
    for (const auto& e : s.effects) significant += e.significant;
  say("synergy: " + std::to_string(significant) + " significant effects");
  if (config.tiers.enabled) {
    tier_stage(config, corpus, out);
    say("tiers: done");
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const json runtime{{"started", started_at},
                     {"finished", utc_now()},
                     {"seconds", seconds},
                     {"workers", config.workers},
                     {"output_dir", config.output_dir.string()}};
  report::write_json(config.output_dir / "manifest.json", build_manifest(config, corpus, out, runtime));
  out.files.push_back("manifest.json");
  return out;
}

json AgreementReport::to_json() const {
  auto one = [](const stats::AgreementResult& r) {
    return json{{"kappa", r.kappa}, {"accuracy", r.accuracy}, {"n", r.n}, {"headline", headline(r)}};
  };
  json j;
  for (const auto& [name, r] : per_dimension) j["dimensions"][name] = one(r);
  j["pooled"] = one(pooled);
  return j;
}

std::string AgreementReport::headline(const stats::AgreementResult& r) {
  return "κ = " + report::fixed(r.kappa, 2) + "; accuracy ≈ " + report::fixed(100.0 * r.accuracy, 1) + "%";
}

AgreementReport agreement(const std::vector<corpus::MessageRecord>& a, const std::vector<corpus::MessageRecord>& b) {
  std::map<std::string, const corpus::MessageRecord*> by_id;
  for (const auto& r : b)
    if (!by_id.emplace(r.id, &r).second) throw DataError("duplicate id in second file: " + r.id);
  if (a.size() != b.size()) throw DataError("files hold different numbers of records");
  std::set<std::string> seen;
  std::array<std::vector<std::string>, corpus::kDimensionCount> la, lb;
  for (const auto& r : a) {
    if (!seen.insert(r.id).second) throw DataError("duplicate id in first file: " + r.id);
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) throw DataError("id " + r.id + " is missing from the second file");
    for (std::size_t d = 0; d < corpus::kDimensionCount; ++d) {
      const auto dim = static_cast<corpus::Dimension>(d);
      auto label = [&](const corpus::MessageRecord& rec) {
        std::string s;
        for (auto c : rec.labels.categories(dim)) {
          if (!s.empty()) s += '|';
          s += corpus::code(c);
        }
        return s;
      };
      la[d].push_back(label(r));
      lb[d].push_back(label(*it->second));
    }
  }
  if (a.empty()) throw DataError("no records to compare");
  AgreementReport rep;
  std::vector<std::string> pa, pb;
  for (std::size_t d = 0; d < corpus::kDimensionCount; ++d) {
    rep.per_dimension.emplace_back(std::string(corpus::dimension_name(static_cast<corpus::Dimension>(d))),
                                   stats::cohen_kappa(la[d], lb[d]));
    pa.insert(pa.end(), la[d].begin(), la[d].end());
    pb.insert(pb.end(), lb[d].begin(), lb[d].end());
  }
  rep.pooled = stats::cohen_kappa(pa, pb);
  return rep;
}

}  // namespace safecomb::pipeline
