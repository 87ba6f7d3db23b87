// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors
//
// safecomb command-line front end.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "safecomb/cluster/model_io.hpp"
#include "safecomb/error.hpp"
#include "safecomb/pipeline/pipeline.hpp"
#include "safecomb/report/report.hpp"
#include "safecomb/synthgen/generator.hpp"

namespace fs = std::filesystem;
using namespace safecomb;
using nlohmann::json;

namespace {

// Flags shared by every subcommand; each overrides the config file.
struct Flags {
  std::string config;
  bool paper_defaults = false;
  std::optional<unsigned> workers;
  std::string input;
  std::string format;
  bool lenient = false;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> min_cluster_size;
  std::optional<int> min_samples;
  std::optional<std::size_t> subsample;
  std::optional<int> repeats;
  std::string model_out;
  std::string model;
  std::string baseline = "all";
  std::string indicators;
  std::optional<int> k_max;
  std::optional<std::size_t> min_n;
  std::optional<int> resamples;
  std::optional<double> level;
  std::string out;
  std::string report;
  std::string spec;
  std::string manifest;
  std::string labels_a;
  std::string labels_b;
};

void add_input(CLI::App* app, Flags& f) {
  app->add_option("--input,-i", f.input, "Corpus file (JSONL or CSV)");
  app->add_option("--format", f.format, "jsonl or csv (default: from extension)");
  app->add_flag("--lenient", f.lenient, "Fill empty dimensions with their absence marker");
}

void add_sweep(CLI::App* app, Flags& f) {
  app->add_option("--indicators", f.indicators, "Comma-separated: likes,comments,shares");
  app->add_option("--k-max", f.k_max, "Largest combination size");
  app->add_option("--min-n", f.min_n, "n_with must exceed this to be significant");
  app->add_option("--resamples", f.resamples, "Bootstrap resamples");
  app->add_option("--level", f.level, "Confidence level");
  app->add_option("--seed", f.seed, "Master seed");
}

pipeline::RunConfig make_config(const Flags& f) {
  pipeline::RunConfig c;
  if (f.paper_defaults) pipeline::apply_paper_defaults(c);
  if (!f.config.empty()) c = pipeline::load_config(f.config, c);
  if (c.output_dir.empty())
    if (const char* env = std::getenv(pipeline::kOutputDirEnv)) c.output_dir = env;
  if (!f.input.empty()) c.input = f.input;
  if (!f.format.empty()) c.format = corpus::parse_format(f.format);
  if (f.lenient) c.lenient = true;
  if (f.seed) c.seed = *f.seed;
  if (!f.out_dir.empty()) c.output_dir = f.out_dir;
  if (f.workers) c.workers = *f.workers;
  if (f.min_cluster_size) c.cluster.min_cluster_size = *f.min_cluster_size;
  if (f.min_samples) c.cluster.min_samples = *f.min_samples;
  if (f.subsample) c.cluster.subsample_size = *f.subsample;
  if (f.repeats) c.stability_repeats = *f.repeats;
  if (!f.indicators.empty()) c.indicators = corpus::parse_indicator_list(f.indicators);
  if (f.k_max) c.synergy.k_max = *f.k_max;
  if (f.min_n) c.synergy.min_n = *f.min_n;
  if (f.resamples) c.synergy.bootstrap.resamples = *f.resamples;
  if (f.level) c.synergy.bootstrap.level = *f.level;
  if (f.baseline != "all") c.baselines = {synergy::find_baseline(c.baselines, f.baseline)};
  return c;
}

// Checks what a partial stage needs and makes the output directory.
void prepare(pipeline::RunConfig& c, bool needs_seed) {
  if (c.input.empty()) throw UsageError("input: no input path given (--input)");
  if (!fs::exists(c.input)) throw UsageError("input: path does not exist: " + c.input.string());
  if (c.output_dir.empty()) c.output_dir = ".";
  if (needs_seed && !c.seed) throw UsageError("seed: required (--seed)");
  fs::create_directories(c.output_dir);
}

void print_warnings(const pipeline::StageOutputs& out) {
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_validate(const Flags& f) {
  auto c = make_config(f);
  prepare(c, false);
  const auto format = c.format.value_or(corpus::format_from_path(c.input));
  const auto corpus = corpus::read_corpus(c.input, format, corpus::ReadOptions{c.lenient});
  const auto report = corpus.report.to_json().dump(2);
  if (f.report.empty()) {
    std::cerr << report << '\n';
  } else {
    std::ofstream(f.report) << report << '\n';
  }
  std::cout << corpus.report.accepted << " accepted, " << corpus.report.rejected << " rejected\n";
  return corpus.report.rejected == 0 ? 0 : 2;
}

int cmd_cluster(const Flags& f) {
  auto c = make_config(f);
  prepare(c, true);
  pipeline::StageOutputs out;
  const auto corpus = pipeline::ingest(c, out);
  const auto s = pipeline::cluster_stage(c, corpus, out);
  if (!f.model_out.empty()) cluster::save_model(f.model_out, s.model);
  std::cout << s.assignment.cluster_count() << " clusters, " << s.assignment.noise_count() << " of "
            << s.assignment.size() << " records noise\n";
  print_warnings(out);
  return 0;
}

int cmd_patterns(const Flags& f) {
  auto c = make_config(f);
  prepare(c, f.model.empty());
  pipeline::StageOutputs out;
  const auto corpus = pipeline::ingest(c, out);
  cluster::ClusterAssignment assignment;
  if (!f.model.empty()) {
    const auto model = pipeline::run_stage("cluster", [&] { return cluster::load_model(f.model); });
    std::vector<corpus::FeatureVector> vectors;
    for (const auto& r : corpus.records) vectors.push_back(r.labels);
    assignment = cluster::approximate_predict(model, vectors);
  } else {
    assignment = pipeline::cluster_stage(c, corpus, out).assignment;
  }
  const auto p = pipeline::pattern_stage(c, corpus, assignment, out);
  for (const auto& a : p.map.assignments) std::cout << "cluster " << a.cluster << ": " << a.pattern << '\n';
  print_warnings(out);
  return 0;
}

int cmd_synergy(const Flags& f) {
  auto c = make_config(f);
  if (!f.out.empty()) {
    const auto parent = fs::path(f.out).parent_path();
    c.output_dir = parent.empty() ? fs::path(".") : parent;
  }
  prepare(c, true);
  pipeline::StageOutputs out;
  const auto corpus = pipeline::ingest(c, out);
  const auto results = pipeline::synergy_stage(c, corpus, out);
  if (!f.out.empty() && fs::path(f.out).filename() != "effects.csv")
    fs::rename(c.output_dir / "effects.csv", f.out);
  std::size_t significant = 0;
  for (const auto& r : results)
    for (const auto& e : r.effects) significant += e.significant;
  std::cout << significant << " significant effects\n";
  print_warnings(out);
  return 0;
}

int cmd_tiers(const Flags& f) {
  auto c = make_config(f);
  prepare(c, true);
  pipeline::StageOutputs out;
  const auto corpus = pipeline::ingest(c, out);
  pipeline::tier_stage(c, corpus, out);
  for (const auto& file : out.files) std::cout << (c.output_dir / file).string() << '\n';
  print_warnings(out);
  return 0;
}

int cmd_simulate(const Flags& f) {
  if (f.spec.empty()) throw UsageError("spec: required (--spec)");
  if (f.out.empty()) throw UsageError("out: required (--out)");
  std::ifstream in(f.spec);
  if (!in) throw UsageError("spec: cannot open " + f.spec);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("spec: " + std::string(e.what()));
  }
  auto spec = synthgen::spec_from_json(j);
  if (f.seed) spec.seed = *f.seed;
  const auto g = synthgen::generate(spec, f.workers.value_or(0));
  corpus::write_corpus(f.out, corpus::format_from_path(f.out), g.records);
  if (!f.manifest.empty()) report::write_json(f.manifest, g.truth.to_json(spec, g.records));
  std::cout << g.records.size() << " records written to " << f.out << '\n';
  return 0;
}

int cmd_agreement(const Flags& f) {
  if (f.labels_a.empty() || f.labels_b.empty()) throw UsageError("agreement needs two label files");
  const auto load = [&](const std::string& path) {
    auto c = corpus::read_corpus(path, corpus::format_from_path(path), corpus::ReadOptions{f.lenient});
    if (c.report.rejected > 0) throw DataError(path + ": " + std::to_string(c.report.rejected) + " rows rejected");
    return c.records;
  };
  const auto rep = pipeline::agreement(load(f.labels_a), load(f.labels_b));
  const auto j = rep.to_json();
  if (!f.out.empty()) report::write_json(f.out, j);
  for (const auto& [name, r] : rep.per_dimension)
    std::cout << name << ": " << pipeline::AgreementReport::headline(r) << '\n';
  std::cout << "pooled: " << pipeline::AgreementReport::headline(rep.pooled) << '\n';
  return 0;
}

int cmd_run(const Flags& f) {
  const auto c = make_config(f);
  const auto out = pipeline::run_pipeline(c, [](const std::string& msg) { std::cerr << msg << '\n'; });
  print_warnings(out);
  std::cout << out.files.size() << " files written to " << c.output_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persuasive-element combination analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_flag("--paper-defaults", f.paper_defaults, "resamples 500, level 0.95, min_n 300, k_max 4, tier cuts 50/90");
  app.add_option("--workers,-j", f.workers, "Worker threads (0 = all cores)");

  auto* validate = app.add_subcommand("validate", "Check a corpus file and print its parse report");
  add_input(validate, f);
  validate->add_option("--report", f.report, "Write the parse report here instead of stderr");

  auto* cluster = app.add_subcommand("cluster", "Fit HDBSCAN on the feature vectors");
  add_input(cluster, f);
  cluster->add_option("--min-cluster-size", f.min_cluster_size, "HDBSCAN minimum cluster size");
  cluster->add_option("--min-samples", f.min_samples, "HDBSCAN core-distance neighbours");
  cluster->add_option("--subsample", f.subsample, "Records drawn for the fit");
  cluster->add_option("--seed", f.seed, "Master seed");
  cluster->add_option("--repeats", f.repeats, "Subsample stability repeats (0 = off)");
  cluster->add_option("--model-out", f.model_out, "Extra copy of the model file");
  cluster->add_option("--out-dir,-o", f.out_dir, "Output directory (falls back to $SAFECOMB_OUT)");

  auto* patterns = app.add_subcommand("patterns", "Profile clusters and map them to patterns");
  add_input(patterns, f);
  patterns->add_option("--model", f.model, "Use a saved cluster model instead of refitting");
  patterns->add_option("--seed", f.seed, "Master seed");
  patterns->add_option("--out-dir,-o", f.out_dir, "Output directory (falls back to $SAFECOMB_OUT)");

  auto* synergy = app.add_subcommand("synergy", "Sweep peripheral combinations per baseline");
  add_input(synergy, f);
  add_sweep(synergy, f);
  synergy->add_option("--baseline", f.baseline, "Baseline name or 'all'");
  synergy->add_option("--out", f.out, "effects.csv path; other tables go beside it");

  auto* tiers = app.add_subcommand("tiers", "Follower tiers, per-tier sweeps and complexity tests");
  add_input(tiers, f);
  add_sweep(tiers, f);
  tiers->add_option("--out-dir,-o", f.out_dir, "Output directory (falls back to $SAFECOMB_OUT)");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus with planted structure");
  simulate->add_option("--spec", f.spec, "Generator spec (JSON)")->required();
  simulate->add_option("--out", f.out, "Corpus output (.jsonl or .csv)")->required();
  simulate->add_option("--manifest", f.manifest, "Ground-truth manifest output");
  simulate->add_option("--seed", f.seed, "Overrides the spec's seed");

  auto* agree = app.add_subcommand("agreement", "Cohen's kappa between two codings");
  agree->add_option("labels_a", f.labels_a, "First coding")->required();
  agree->add_option("labels_b", f.labels_b, "Second coding")->required();
  agree->add_option("--out", f.out, "JSON output");
  agree->add_flag("--lenient", f.lenient, "Fill empty dimensions with their absence marker");

  auto* run = app.add_subcommand("run", "Full pipeline: ingest to tier reports");
  add_input(run, f);
  add_sweep(run, f);
  run->add_option("--out-dir,-o", f.out_dir, "Output directory (falls back to $SAFECOMB_OUT)");
  run->add_option("--min-cluster-size", f.min_cluster_size, "HDBSCAN minimum cluster size");
  run->add_option("--min-samples", f.min_samples, "HDBSCAN core-distance neighbours");
  run->add_option("--subsample", f.subsample, "Records drawn for the fit");
  run->add_option("--repeats", f.repeats, "Subsample stability repeats (0 = off)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*validate) return cmd_validate(f);
    if (*cluster) return cmd_cluster(f);
    if (*patterns) return cmd_patterns(f);
    if (*synergy) return cmd_synergy(f);
    if (*tiers) return cmd_tiers(f);
    if (*simulate) return cmd_simulate(f);
    if (*agree) return cmd_agreement(f);
    if (*run) return cmd_run(f);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
