// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safecomb/cluster/hdbscan.hpp"
#include "safecomb/error.hpp"
#include "safecomb/corpus/io.hpp"
#include "safecomb/patterns/patterns.hpp"
#include "safecomb/stats/stats.hpp"
#include "safecomb/synergy/synergy.hpp"
#include "safecomb/tiers/tiers.hpp"

namespace safecomb::pipeline {

namespace fs = std::filesystem;

struct TierConfig {
  bool enabled = true;
  bool rescale_min_n = false;
  stats::Adjust adjust = stats::Adjust::Holm;
};

struct RunConfig {
  fs::path input;
  std::optional<corpus::Format> format;  ///< guessed from the extension when empty
  bool lenient = false;
  std::optional<std::uint64_t> seed;
  cluster::ClusterParams cluster;
  int stability_repeats = 0;
  patterns::PatternConfig patterns = patterns::default_pattern_config();
  double dominance_threshold = 0.5;
  double pair_threshold = 0.6;
  std::vector<synergy::BaselinePredicate> baselines = synergy::default_baselines();
  std::vector<corpus::Indicator> indicators{corpus::kIndicators.begin(), corpus::kIndicators.end()};
  synergy::SynergyParams synergy;
  std::size_t table_rows = 2;  ///< combinations per effect-table cell
  TierConfig tiers;
  fs::path output_dir;
  unsigned workers = 0;

  /// Throws UsageError naming the offending field.
  void validate() const;
};

/// Applies a JSON config on top of `base`. Unknown keys are rejected.
/// Baselines with a known name replace that baseline; others are appended.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const fs::path& path, RunConfig base = {});
/// Everything that determines the outputs; paths of the output directory
/// and the worker count are left out.
nlohmann::json config_to_json(const RunConfig& config);

/// resamples 500, level 0.95, min_n 300, k_max 4.
void apply_paper_defaults(RunConfig& config);

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "SAFECOMB_OUT";

struct StageOutputs {
  std::vector<std::string> files;  ///< relative to the output directory, in write order
  std::vector<std::string> warnings;
};

using Logger = std::function<void(const std::string&)>;

/// Stage-tagged wrapper: rethrows the same error type with "<stage>: " prefixed.
template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f());

/// Full run. Each stage writes its files before the next starts, so a failure
/// leaves earlier outputs on disk. Ends with manifest.json.
StageOutputs run_pipeline(const RunConfig& config, const Logger& log = {});

// Single stages, also used by the subcommands.
corpus::Corpus ingest(const RunConfig& config, StageOutputs& out);
struct ClusterStage {
  cluster::ClusterModel model;
  cluster::ClusterAssignment assignment;
};
ClusterStage cluster_stage(const RunConfig& config, const corpus::Corpus& corpus, StageOutputs& out);
struct PatternStage {
  std::vector<patterns::ClusterProfile> profiles;
  patterns::PatternMap map;
  patterns::SimilarityReport similarity;
};
PatternStage pattern_stage(const RunConfig& config, const corpus::Corpus& corpus, const cluster::ClusterAssignment& a,
                           StageOutputs& out);
std::vector<synergy::SweepResult> synergy_stage(const RunConfig& config, const corpus::Corpus& corpus,
                                                StageOutputs& out);
void tier_stage(const RunConfig& config, const corpus::Corpus& corpus, StageOutputs& out);

/// Lower-case hex SHA-256 of a file.
std::string sha256_file(const fs::path& path);

/// manifest.json: tool and library versions, config echo, seed, input and
/// output digests, and a "runtime" block (timestamps, workers, paths) that
/// is the only part allowed to differ between reruns.
nlohmann::json build_manifest(const RunConfig& config, const corpus::Corpus& corpus, const StageOutputs& out,
                              const nlohmann::json& runtime);

struct AgreementReport {
  /// Source, Appeal, Frame, Evidence. A record's label in a dimension is its
  /// whole category set, e.g. "Exp|OffM".
  std::vector<std::pair<std::string, stats::AgreementResult>> per_dimension;
  stats::AgreementResult pooled;  ///< the four dimensions' labels concatenated
  nlohmann::json to_json() const;
  /// "κ = 0.78; accuracy ≈ 83.5%"
  static std::string headline(const stats::AgreementResult& r);
};

/// Compares two codings of the same records, matched by id. Throws DataError
/// when the id sets differ.
AgreementReport agreement(const std::vector<corpus::MessageRecord>& a, const std::vector<corpus::MessageRecord>& b);

template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const UsageError& e) {
    throw UsageError(std::string(stage) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string(stage) + ": " + e.what());
  }
}

}  // namespace safecomb::pipeline
