// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safecomb/cluster/hdbscan.hpp"
#include "safecomb/corpus/record.hpp"
#include "safecomb/patterns/patterns.hpp"
#include "safecomb/synergy/synergy.hpp"
#include "safecomb/tiers/tiers.hpp"

namespace safecomb::report {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Shortest text that reads back to the same double.
std::string number(double value);
/// Fixed decimals; never "-0.00".
std::string fixed(double value, int decimals);
/// Two decimals, or three below 0.01 ("0.03", "0.004", "0.000").
std::string p_value(double p);

/// RFC 4180: fields with commas, quotes or line breaks are quoted.
void write_csv(std::ostream& out, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
/// Two-space indented JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Column layouts of every emitted table.
extern const std::vector<std::string> kAssignmentColumns;
extern const std::vector<std::string> kClusterColumns;
extern const std::vector<std::string> kPatternAssignmentColumns;
extern const std::vector<std::string> kSimilarityPairColumns;
extern const std::vector<std::string> kEffectColumns;
extern const std::vector<std::string> kTable4Columns;
extern const std::vector<std::string> kFigure5Columns;
extern const std::vector<std::string> kComplexityColumns;
extern const std::vector<std::string> kTierEffectColumns;
extern const std::vector<std::string> kTierComplexityColumns;

Table assignments_table(std::span<const corpus::MessageRecord> records, const cluster::ClusterAssignment& assignment);
Table clusters_table(std::span<const patterns::ClusterProfile> profiles, const patterns::PatternMap& map);
Table pattern_assignment_table(const patterns::PatternMap& map);
/// First column "cluster", then one column per cluster id.
Table similarity_table(const patterns::SimilarityReport& report);
Table similarity_pairs_table(const patterns::SimilarityReport& report);

Table effects_table(std::span<const synergy::CombinationEffect> effects);
/// Best and worst significant combinations per baseline and indicator.
Table table4(std::span<const synergy::CombinationEffect> effects, std::span<const std::string> baselines,
             std::size_t per_cell = 2);
/// Significant combinations, the data behind the overlap diagram.
Table figure5_table(std::span<const synergy::CombinationEffect> effects);
Table complexity_table(const synergy::ComplexityCurve& curve);

/// Best significant combinations per baseline, tier and indicator.
Table tier_effects_table(const tiers::TierSweep& sweep, std::span<const std::string> baselines,
                         std::size_t per_cell = 2);
/// Level, counts, mean, SD, range and Dunn pairs listed on their first tier.
Table tier_complexity_table(const tiers::TierComplexity& complexity);
nlohmann::json tier_summary_json(const tiers::TierPartition& partition, const tiers::TierSweep& sweep);
nlohmann::json tier_tests_json(const tiers::TierComplexity& complexity);

}  // namespace safecomb::report
