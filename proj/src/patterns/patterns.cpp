// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/patterns/patterns.hpp"

#include <cmath>
#include <set>

#include "safecomb/error.hpp"
#include "safecomb/stats/stats.hpp"

namespace safecomb::patterns {

namespace {

using C = Category;

std::vector<double> as_dense(FeatureVector v) { return v.to_dense(); }

FeatureVector parse_vector(const nlohmann::json& codes) {
  if (!codes.is_array()) throw UsageError("prototype must be an array of category codes");
  FeatureVector v;
  for (const auto& item : codes) {
    const auto text = item.get<std::string>();
    const auto c = corpus::parse_category(text);
    if (!c) throw UsageError("unknown category in prototype: " + text);
    v.set(*c);
  }
  return v;
}

}  // namespace

std::vector<ClusterProfile> profile_clusters(const cluster::ClusterAssignment& assignment,
                                             std::span<const FeatureVector> vectors, double dominance_threshold) {
  if (assignment.size() != vectors.size())
    throw UsageError("cluster assignment covers " + std::to_string(assignment.size()) + " records, corpus has " +
                     std::to_string(vectors.size()));
  std::map<int, ClusterProfile> by_id;
  std::map<int, std::array<std::size_t, corpus::kCategoryCount>> counts;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const int label = assignment.labels[i];
    if (label == cluster::kNoise) continue;
    auto& profile = by_id[label];
    profile.cluster = label;
    ++profile.size;
    auto& c = counts[label];
    for (std::size_t s = 0; s < corpus::kCategoryCount; ++s) c[s] += vectors[i].test(corpus::category_at(s));
  }
  if (by_id.empty()) throw DataError("no clusters to profile: every record is noise");

  std::vector<ClusterProfile> out;
  for (auto& [id, profile] : by_id) {
    const auto& c = counts[id];
    for (std::size_t s = 0; s < corpus::kCategoryCount; ++s) {
      profile.centroid[s] = static_cast<double>(c[s]) / static_cast<double>(profile.size);
      if (profile.centroid[s] >= dominance_threshold) profile.dominant.push_back(corpus::category_at(s));
    }
    out.push_back(std::move(profile));
  }
  return out;
}

void PatternConfig::validate() const {
  if (patterns.empty()) throw UsageError("pattern config has no patterns");
  std::set<std::string> names;
  for (const auto& p : patterns) {
    if (p.name.empty()) throw UsageError("pattern name is empty");
    if (!names.insert(p.name).second) throw UsageError("duplicate pattern name: " + p.name);
    if (p.prototypes.empty()) throw UsageError("pattern " + p.name + " has no prototypes");
    for (const auto& proto : p.prototypes)
      if (auto why = corpus::validate_features(proto.vector); !why.empty())
        throw UsageError("pattern " + p.name + " prototype " + proto.vector.to_bitstring() + ": " + why);
  }
  for (const auto& [cluster, name] : overrides)
    if (!names.count(name)) throw UsageError("override for cluster " + std::to_string(cluster) + " names unknown pattern " + name);
}

const PatternDef* PatternConfig::find(const std::string& name) const {
  for (const auto& p : patterns)
    if (p.name == name) return &p;
  return nullptr;
}

PatternConfig default_pattern_config() {
  auto proto = [](std::initializer_list<C> cats, std::string note) { return Prototype{FeatureVector(cats), std::move(note)}; };
  PatternConfig config;
  config.patterns = {
      {"IAP",
       {proto({C::Exp, C::Valu, C::Gain, C::ExpEv}, "Cluster 16"),
        proto({C::Exp, C::Util, C::Gain, C::ExpEv}, "Cluster 15"),
        proto({C::Exp, C::Valu, C::Util, C::Gain, C::ExpEv}, "Cluster 0"),
        proto({C::Exp, C::NoApp, C::Gain, C::ExpEv}, "Cluster 7"),
        proto({C::Exp, C::NoApp, C::NoFrm, C::ExpEv}, "Cluster 14"),
        proto({C::OffM, C::Valu, C::Gain, C::NoEv}, "Cluster 13"),
        proto({C::OffM, C::Valu, C::Gain, C::ExpEv}, "Cluster 13"),
        proto({C::OffM, C::Util, C::Gain, C::NoEv}, "Cluster 13"),
        proto({C::OffM, C::Util, C::Gain, C::ExpEv}, "Cluster 13"),
        proto({C::OffM, C::Exp, C::Valu, C::Gain, C::StatEv}, "Cluster 20"),
        proto({C::OffM, C::Exp, C::Valu, C::Gain, C::ExpEv}, "Cluster 20")}},
      {"NP",
       {proto({C::NoSrc, C::Valu, C::Gain, C::NarrEv}, "Cluster 3"),
        proto({C::NoSrc, C::Util, C::Gain, C::NarrEv}, "Cluster 9"),
        proto({C::NoSrc, C::Valu, C::Util, C::Gain, C::NarrEv}, "Cluster 1"),
        proto({C::NoSrc, C::NoApp, C::Gain, C::NarrEv}, "Cluster 4"),
        proto({C::NoSrc, C::NoApp, C::NoFrm, C::NarrEv}, "Cluster 5"),
        proto({C::Exp, C::Valu, C::Gain, C::NarrEv}, "Cluster 6")}},
      {"AA",
       {proto({C::NoSrc, C::Valu, C::Gain, C::NoEv}, "Cluster 19"),
        proto({C::NoSrc, C::Util, C::Gain, C::NoEv}, "Cluster 11"),
        proto({C::NoSrc, C::Valu, C::Util, C::Gain, C::NoEv}, "Cluster 17"),
        proto({C::NoSrc, C::Fear, C::Gain, C::NoEv}, "Cluster 10"),
        proto({C::NoSrc, C::Fear, C::Loss, C::NoEv}, "Cluster 12")}},
      {"CE",
       {proto({C::NoSrc, C::NoApp, C::NoFrm, C::NoEv}, "Cluster 18"),
        proto({C::NoSrc, C::NoApp, C::Gain, C::NoEv}, "Cluster 8"),
        proto({C::OffM, C::NoApp, C::Gain, C::NoEv}, "Cluster 2"),
        proto({C::Exp, C::NoApp, C::Gain, C::NoEv}, "Cluster 2")}},
  };
  return config;
}

nlohmann::json pattern_config_to_json(const PatternConfig& config) {
  nlohmann::json patterns = nlohmann::json::array();
  for (const auto& p : config.patterns) {
    nlohmann::json protos = nlohmann::json::array();
    for (const auto& proto : p.prototypes) {
      nlohmann::json codes = nlohmann::json::array();
      for (Category c : proto.vector.categories()) codes.push_back(std::string(corpus::code(c)));
      protos.push_back(codes);
    }
    patterns.push_back({{"name", p.name}, {"prototypes", protos}});
  }
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& [cluster, name] : config.overrides) overrides[std::to_string(cluster)] = name;
  return {{"patterns", patterns}, {"overrides", overrides}};
}

PatternConfig pattern_config_from_json(const nlohmann::json& j) {
  PatternConfig config;
  try {
    if (j.contains("patterns")) {
      for (const auto& p : j.at("patterns")) {
        PatternDef def;
        def.name = p.at("name").get<std::string>();
        for (const auto& codes : p.at("prototypes")) def.prototypes.push_back({parse_vector(codes), ""});
        config.patterns.push_back(std::move(def));
      }
    } else {
      config.patterns = default_pattern_config().patterns;
    }
    if (j.contains("overrides"))
      for (const auto& [key, value] : j.at("overrides").items()) {
        std::size_t used = 0;
        const int cluster = std::stoi(key, &used);
        if (used != key.size()) throw UsageError("override key is not a cluster id: " + key);
        config.overrides[cluster] = value.get<std::string>();
      }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed pattern config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw UsageError("override keys must be cluster ids");
  }
  config.validate();
  return config;
}

const std::string& PatternMap::pattern_of(int cluster) const {
  for (const auto& a : assignments)
    if (a.cluster == cluster) return a.pattern;
  throw UsageError("cluster " + std::to_string(cluster) + " has no pattern");
}

PatternMap assign_patterns(std::span<const ClusterProfile> profiles, const PatternConfig& config) {
  config.validate();
  PatternMap out;
  for (const auto& profile : profiles) {
    const std::vector<double> centroid(profile.centroid.begin(), profile.centroid.end());
    bool zero = true;
    for (double x : centroid) zero = zero && x == 0.0;
    if (zero) throw DataError("cluster " + std::to_string(profile.cluster) + " has an all-zero centroid");

    // Best prototype per pattern, then best pattern (first declared on ties).
    std::vector<std::pair<double, FeatureVector>> best;
    for (const auto& p : config.patterns) {
      std::pair<double, FeatureVector> b{-1.0, {}};
      for (const auto& proto : p.prototypes) {
        const double s = stats::cosine_similarity(centroid, as_dense(proto.vector));
        if (s > b.first) b = {s, proto.vector};
      }
      best.push_back(b);
    }
    std::size_t winner = 0;
    for (std::size_t k = 1; k < best.size(); ++k)
      if (best[k].first > best[winner].first) winner = k;
    for (std::size_t k = 0; k < best.size(); ++k)
      if (k != winner && std::abs(best[k].first - best[winner].first) <= 1e-12)
        out.warnings.push_back("cluster " + std::to_string(profile.cluster) + " ties between patterns " +
                               config.patterns[winner].name + " and " + config.patterns[k].name + "; kept " +
                               config.patterns[winner].name);

    PatternAssignment a;
    a.cluster = profile.cluster;
    if (auto it = config.overrides.find(profile.cluster); it != config.overrides.end()) {
      winner = static_cast<std::size_t>(config.find(it->second) - config.patterns.data());
      a.overridden = true;
    }
    a.pattern = config.patterns[winner].name;
    a.score = best[winner].first;
    a.matched = best[winner].second;
    out.assignments.push_back(std::move(a));
  }
  for (const auto& [cluster, name] : config.overrides) {
    bool present = false;
    for (const auto& a : out.assignments) present = present || a.cluster == cluster;
    if (!present) out.warnings.push_back("override for cluster " + std::to_string(cluster) + " matches no cluster");
  }
  return out;
}

SimilarityReport similarity_report(std::span<const ClusterProfile> profiles, const PatternMap& patterns,
                                   const PatternConfig& config, double pair_threshold) {
  if (profiles.empty()) throw UsageError("similarity report needs at least one cluster");
  SimilarityReport r;
  r.pair_threshold = pair_threshold;
  const std::size_t n = profiles.size();
  std::vector<std::vector<double>> dense;
  for (const auto& p : profiles) {
    r.clusters.push_back(p.cluster);
    dense.emplace_back(p.centroid.begin(), p.centroid.end());
  }
  r.matrix.assign(n, std::vector<double>(n, 1.0));
  std::vector<double> off;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = stats::cosine_similarity(dense[i], dense[j]);
      r.matrix[i][j] = r.matrix[j][i] = s;
      off.push_back(s);
      if (s > pair_threshold) r.high_pairs.push_back({r.clusters[i], r.clusters[j], s});
    }
  if (!off.empty()) r.global_mean = stats::mean(off);
  if (off.size() >= 2) r.global_sd = stats::sample_sd(off);

  for (const auto& def : config.patterns) {
    WithinPattern w;
    w.pattern = def.name;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (patterns.pattern_of(r.clusters[i]) == def.name) {
        idx.push_back(i);
        w.clusters.push_back(r.clusters[i]);
      }
    if (idx.empty()) continue;
    std::vector<double> values;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) values.push_back(r.matrix[idx[a]][idx[b]]);
    w.pairs = values.size();
    if (!values.empty()) w.mean = stats::mean(values);
    r.within.push_back(std::move(w));
  }
  return r;
}

nlohmann::json similarity_summary_json(const SimilarityReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json { return v ? nlohmann::json(*v) : nlohmann::json("n/a"); };
  nlohmann::json within = nlohmann::json::array();
  for (const auto& w : r.within)
    within.push_back({{"pattern", w.pattern}, {"clusters", w.clusters}, {"pairs", w.pairs}, {"mean", opt(w.mean)}});
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.high_pairs) pairs.push_back({{"a", p.a}, {"b", p.b}, {"similarity", p.similarity}});
  return {{"clusters", r.clusters},
          {"within", within},
          {"global_mean", opt(r.global_mean)},
          {"global_sd", opt(r.global_sd)},
          {"pair_threshold", r.pair_threshold},
          {"high_pairs", pairs}};
}

}  // namespace safecomb::patterns
