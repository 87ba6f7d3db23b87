// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/report/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "safecomb/error.hpp"

namespace safecomb::report {

using corpus::Indicator;
using nlohmann::json;

const std::vector<std::string> kAssignmentColumns{"id", "cluster", "strength"};
const std::vector<std::string> kClusterColumns{"id", "size", "pattern", "dominant", "centroid"};
const std::vector<std::string> kPatternAssignmentColumns{"cluster", "pattern", "score", "prototype", "overridden"};
const std::vector<std::string> kSimilarityPairColumns{"cluster_a", "cluster_b", "similarity"};
const std::vector<std::string> kEffectColumns{"pattern", "combination", "indicator", "k",     "n_with",
                                              "n_without", "delta_e",   "ci_lo",     "ci_hi", "significant"};
const std::vector<std::string> kTable4Columns{"pattern", "polarity", "likes", "comments", "shares"};
const std::vector<std::string> kFigure5Columns{"pattern", "indicator", "combination", "k", "n_with", "delta_e", "direction"};
const std::vector<std::string> kComplexityColumns{"pattern", "indicator", "k", "mean_delta_e", "count", "stderr"};
const std::vector<std::string> kTierEffectColumns{"pattern", "tier", "likes", "comments", "shares"};
const std::vector<std::string> kTierComplexityColumns{"level", "count", "mean", "sd", "min", "max", "dunn_p"};

std::string number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string p_value(double p) { return fixed(p, p < 0.01 ? 3 : 2); }

namespace {

void write_field(std::ostream& out, const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    write_field(out, row[i]);
  }
  out << '\n';
}

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : ""; }

std::string indicator(Indicator i) { return std::string(corpus::indicator_name(i)); }

std::string codes(std::span<const corpus::Category> cats) {
  std::string out;
  for (auto c : cats) {
    if (!out.empty()) out += '+';
    out += corpus::code(c);
  }
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
  write_row(out, table.columns);
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw NumericError("report row width does not match its header");
    write_row(out, row);
  }
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(out, table);
  if (!out) throw DataError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

Table assignments_table(std::span<const corpus::MessageRecord> records, const cluster::ClusterAssignment& assignment) {
  Table t{kAssignmentColumns, {}};
  for (std::size_t i = 0; i < records.size(); ++i)
    t.rows.push_back({records[i].id, std::to_string(assignment.labels[i]), number(assignment.strengths[i])});
  return t;
}

Table clusters_table(std::span<const patterns::ClusterProfile> profiles, const patterns::PatternMap& map) {
  Table t{kClusterColumns, {}};
  for (const auto& p : profiles) {
    std::string centroid;
    for (std::size_t i = 0; i < p.centroid.size(); ++i) {
      if (i) centroid += ';';
      centroid += number(p.centroid[i]);
    }
    t.rows.push_back({std::to_string(p.cluster), std::to_string(p.size), map.pattern_of(p.cluster), codes(p.dominant),
                      centroid});
  }
  return t;
}

Table pattern_assignment_table(const patterns::PatternMap& map) {
  Table t{kPatternAssignmentColumns, {}};
  for (const auto& a : map.assignments) {
    const auto cats = a.matched.categories();
    t.rows.push_back({std::to_string(a.cluster), a.pattern, number(a.score), codes(cats), a.overridden ? "true" : "false"});
  }
  return t;
}

Table similarity_table(const patterns::SimilarityReport& report) {
  Table t{{"cluster"}, {}};
  for (int c : report.clusters) t.columns.push_back(std::to_string(c));
  for (std::size_t i = 0; i < report.clusters.size(); ++i) {
    std::vector<std::string> row{std::to_string(report.clusters[i])};
    for (double v : report.matrix[i]) row.push_back(number(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table similarity_pairs_table(const patterns::SimilarityReport& report) {
  Table t{kSimilarityPairColumns, {}};
  for (const auto& p : report.high_pairs)
    t.rows.push_back({std::to_string(p.a), std::to_string(p.b), number(p.similarity)});
  return t;
}

Table effects_table(std::span<const synergy::CombinationEffect> effects) {
  Table t{kEffectColumns, {}};
  for (const auto& e : effects) {
    t.rows.push_back({e.baseline, synergy::format_combination(e.combination), indicator(e.indicator),
                      std::to_string(e.k()), std::to_string(e.n_with), std::to_string(e.n_without),
                      optional_number(e.delta_e), e.ci ? number(e.ci->lo) : "", e.ci ? number(e.ci->hi) : "",
                      e.significant ? "true" : "false"});
  }
  return t;
}

Table table4(std::span<const synergy::CombinationEffect> effects, std::span<const std::string> baselines,
             std::size_t per_cell) {
  Table t{kTable4Columns, {}};
  for (const auto& b : baselines) {
    std::vector<std::string> positive{b, "Positive"}, negative{b, "Negative"};
    for (Indicator i : corpus::kIndicators) {
      const auto x = synergy::extremes(effects, b, i, per_cell);
      positive.push_back(synergy::format_effect_cell(x.positive, 3, "+"));
      negative.push_back(synergy::format_effect_cell(x.negative, 3, "+"));
    }
    t.rows.push_back(std::move(positive));
    t.rows.push_back(std::move(negative));
  }
  return t;
}

Table figure5_table(std::span<const synergy::CombinationEffect> effects) {
  Table t{kFigure5Columns, {}};
  for (const auto& e : effects) {
    if (!e.significant) continue;
    t.rows.push_back({e.baseline, indicator(e.indicator), synergy::format_combination(e.combination),
                      std::to_string(e.k()), std::to_string(e.n_with), number(*e.delta_e),
                      *e.delta_e > 0 ? "reinforcing" : "inhibiting"});
  }
  return t;
}

Table complexity_table(const synergy::ComplexityCurve& curve) {
  Table t{kComplexityColumns, {}};
  for (const auto& p : curve.points)
    t.rows.push_back({p.baseline, indicator(p.indicator), std::to_string(p.k), number(p.mean_delta_e),
                      std::to_string(p.count), optional_number(p.stderr_delta_e)});
  return t;
}

Table tier_effects_table(const tiers::TierSweep& sweep, std::span<const std::string> baselines, std::size_t per_cell) {
  Table t{kTierEffectColumns, {}};
  for (const auto& b : baselines) {
    for (tiers::Tier tier : tiers::kTiers) {
      const auto effects = sweep.effects(tier);
      std::vector<std::string> row{b, std::string(tiers::tier_name(tier))};
      for (Indicator i : corpus::kIndicators)
        row.push_back(synergy::format_effect_cell(synergy::extremes(effects, b, i, per_cell).positive, 2, " + "));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table tier_complexity_table(const tiers::TierComplexity& c) {
  Table t{kTierComplexityColumns, {}};
  for (tiers::Tier tier : tiers::kTiers) {
    const auto& d = c.descriptives[static_cast<std::size_t>(tier)];
    std::string dunn;
    if (c.dunn) {
      for (const auto& p : c.dunn->pairs) {
        if (c.tested[p.group_a] != tier) continue;
        if (!dunn.empty()) dunn += "; ";
        dunn += std::string(tiers::tier_name(tier)) + "-" + std::string(tiers::tier_name(c.tested[p.group_b])) + ": " +
                p_value(p.p_adjusted);
      }
    }
    if (dunn.empty()) dunn = "—";
    t.rows.push_back({std::string(tiers::tier_name(tier)), std::to_string(d.count), d.mean ? fixed(*d.mean, 2) : "",
                      d.sd ? fixed(*d.sd, 2) : "", d.min ? std::to_string(*d.min) : "",
                      d.max ? std::to_string(*d.max) : "", dunn});
  }
  return t;
}

json tier_summary_json(const tiers::TierPartition& partition, const tiers::TierSweep& sweep) {
  json j;
  j["tiers"] = json::array();
  for (tiers::Tier tier : tiers::kTiers) {
    const auto i = static_cast<std::size_t>(tier);
    const auto& f = partition.followers[i];
    json tj{{"tier", tiers::tier_name(tier)}, {"accounts", f.accounts}, {"records", sweep.records[i]},
            {"min_n", sweep.min_n[i]}};
    tj["follower_mean"] = f.mean ? json(*f.mean) : json(nullptr);
    tj["follower_sd"] = f.sd ? json(*f.sd) : json(nullptr);
    j["tiers"].push_back(std::move(tj));
  }
  if (partition.anova) {
    j["anova"] = {{"f", partition.anova->f},
                  {"df_between", partition.anova->df_between},
                  {"df_within", partition.anova->df_within},
                  {"p_value", partition.anova->p_value}};
  } else {
    j["anova"] = {{"undefined", partition.anova_note}};
  }
  j["cuts"] = {{"middle", 50}, {"top", 90}};
  std::vector<std::string> warnings = partition.warnings;
  warnings.insert(warnings.end(), sweep.warnings.begin(), sweep.warnings.end());
  j["warnings"] = warnings;
  return j;
}

json tier_tests_json(const tiers::TierComplexity& c) {
  json j;
  j["tested"] = json::array();
  for (auto t : c.tested) j["tested"].push_back(tiers::tier_name(t));
  if (c.kruskal_wallis) {
    j["kruskal_wallis"] = {{"h", c.kruskal_wallis->statistic},
                           {"df", c.kruskal_wallis->df},
                           {"p_value", c.kruskal_wallis->p_value},
                           {"group_sizes", c.kruskal_wallis->group_sizes}};
  } else {
    j["kruskal_wallis"] = nullptr;
  }
  if (c.dunn) {
    json pairs = json::array();
    for (const auto& p : c.dunn->pairs)
      pairs.push_back({{"a", tiers::tier_name(c.tested[p.group_a])},
                       {"b", tiers::tier_name(c.tested[p.group_b])},
                       {"z", p.z},
                       {"p_raw", p.p_raw},
                       {"p_adjusted", p.p_adjusted}});
    j["dunn"] = {{"adjust", stats::adjust_name(c.dunn->adjust)}, {"pairs", std::move(pairs)}};
  } else {
    j["dunn"] = nullptr;
  }
  j["warnings"] = c.warnings;
  return j;
}

}  // namespace safecomb::report
