// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/synthgen/generator.hpp"

#include <cmath>
#include <cstdio>

#include "safecomb/error.hpp"
#include "safecomb/parallel.hpp"
#include "safecomb/patterns/patterns.hpp"
#include "safecomb/synthgen/perturb.hpp"

namespace safecomb::synthgen {

using corpus::Category;
using corpus::Indicator;
using nlohmann::json;

namespace {

Category category_or_throw(const std::string& text) {
  const auto c = corpus::parse_category(text);
  if (!c) throw UsageError("unknown category: " + text);
  return *c;
}

FeatureVector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw UsageError(field + " must be an array of category codes");
  FeatureVector v;
  for (const auto& c : j) v.set(category_or_throw(c.get<std::string>()));
  return v;
}

json vector_to_json(FeatureVector v) {
  json out = json::array();
  for (Category c : v.categories()) out.push_back(std::string(corpus::code(c)));
  return out;
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, unused] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw UsageError("unknown key '" + key + "' in " + where);
}

std::uint64_t index_seed(std::uint64_t base, std::size_t index) {
  std::uint64_t s = base ^ (static_cast<std::uint64_t>(index) * 0xD1B54A32D192ED03ULL);
  return splitmix64(s);
}

std::string record_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "syn-%07zu", i);
  return buf;
}

std::string account_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "acct-%05zu", i);
  return buf;
}

std::uint64_t to_count(double x) {
  if (!(x > 0.0)) return 0;
  if (x > 1e15) return static_cast<std::uint64_t>(1e15);
  return static_cast<std::uint64_t>(std::llround(x));
}

}  // namespace

void GeneratorSpec::validate() const {
  if (patterns.empty() && uniform_noise == 0) throw UsageError("generator spec produces no records");
  if (!(flip_rate >= 0.0 && flip_rate < 0.5)) throw UsageError("flip_rate must lie in [0, 0.5)");
  if (accounts == 0) throw UsageError("accounts must be positive");
  if (!(follower_sigma >= 0.0) || !std::isfinite(follower_mu)) throw UsageError("invalid follower distribution");
  for (const auto& m : engagement)
    if (!(m.sigma0 > 0.0) || !std::isfinite(m.mu0)) throw UsageError("engagement sigma0 must be positive");
  for (const auto& p : patterns) {
    const auto problem = corpus::validate_features(p.prototype);
    if (!problem.empty()) throw UsageError("prototype of " + p.name + ": " + problem);
    for (const auto& [c, rate] : p.peripheral_rates)
      if (!(rate >= 0.0 && rate <= 1.0))
        throw UsageError("peripheral rate of " + std::string(corpus::code(c)) + " must lie in [0, 1]");
  }
  for (const auto& e : effects) {
    synergy::find_baseline(baselines, e.baseline);
    if (e.combination.empty()) throw UsageError("planted effect on " + e.baseline + " has an empty combination");
    if (!std::isfinite(e.beta)) throw UsageError("planted effect beta must be finite");
  }
}

FeatureVector default_prototype(const std::string& pattern) {
  const auto config = patterns::default_pattern_config();
  const auto* def = config.find(pattern);
  if (!def || def->prototypes.empty()) throw UsageError("no default prototype for pattern " + pattern);
  return def->prototypes.front().vector;
}

GeneratorSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("generator spec must be a JSON object");
  reject_unknown(j,
                 {"seed", "patterns", "flip_rate", "uniform_noise", "accounts", "followers", "engagement", "effects",
                  "baselines"},
                 "generator spec");
  GeneratorSpec s;
  try {
    s.seed = j.value("seed", std::uint64_t{0});
    s.flip_rate = j.value("flip_rate", s.flip_rate);
    s.uniform_noise = j.value("uniform_noise", s.uniform_noise);
    s.accounts = j.value("accounts", s.accounts);
    if (j.contains("followers")) {
      const auto& f = j.at("followers");
      reject_unknown(f, {"mu", "sigma"}, "followers");
      s.follower_mu = f.value("mu", s.follower_mu);
      s.follower_sigma = f.value("sigma", s.follower_sigma);
    }
    if (j.contains("engagement")) {
      for (const auto& [name, m] : j.at("engagement").items()) {
        reject_unknown(m, {"mu0", "sigma0"}, "engagement." + name);
        auto& model = s.engagement[static_cast<std::size_t>(corpus::parse_indicator(name))];
        model.mu0 = m.value("mu0", model.mu0);
        model.sigma0 = m.value("sigma0", model.sigma0);
      }
    }
    if (j.contains("baselines")) {
      s.baselines.clear();
      for (const auto& b : j.at("baselines")) s.baselines.push_back(synergy::baseline_from_json(b));
    }
    for (const auto& p : j.value("patterns", json::array())) {
      reject_unknown(p, {"name", "size", "prototype", "peripheral_rates"}, "patterns[]");
      PatternPopulation pop;
      pop.name = p.at("name").get<std::string>();
      pop.size = p.value("size", std::size_t{0});
      pop.prototype = p.contains("prototype") ? vector_from_json(p.at("prototype"), "prototype")
                                              : default_prototype(pop.name);
      for (const auto& [code, rate] : p.value("peripheral_rates", json::object()).items())
        pop.peripheral_rates[category_or_throw(code)] = rate.get<double>();
      s.patterns.push_back(std::move(pop));
    }
    for (const auto& e : j.value("effects", json::array())) {
      reject_unknown(e, {"baseline", "combination", "indicator", "beta", "tier"}, "effects[]");
      PlantedEffect pe;
      pe.baseline = e.at("baseline").get<std::string>();
      pe.combination = vector_from_json(e.at("combination"), "combination");
      pe.indicator = corpus::parse_indicator(e.at("indicator").get<std::string>());
      pe.beta = e.at("beta").get<double>();
      if (e.contains("tier") && !e.at("tier").is_null()) pe.tier = tiers::parse_tier(e.at("tier").get<std::string>());
      s.effects.push_back(std::move(pe));
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("generator spec: ") + e.what());
  }
  s.validate();
  return s;
}

json spec_to_json(const GeneratorSpec& s) {
  json j;
  j["seed"] = s.seed;
  j["flip_rate"] = s.flip_rate;
  j["uniform_noise"] = s.uniform_noise;
  j["accounts"] = s.accounts;
  j["followers"] = {{"mu", s.follower_mu}, {"sigma", s.follower_sigma}};
  for (Indicator i : corpus::kIndicators) {
    const auto& m = s.engagement[static_cast<std::size_t>(i)];
    j["engagement"][std::string(corpus::indicator_name(i))] = {{"mu0", m.mu0}, {"sigma0", m.sigma0}};
  }
  j["patterns"] = json::array();
  for (const auto& p : s.patterns) {
    json pj{{"name", p.name}, {"size", p.size}, {"prototype", vector_to_json(p.prototype)}};
    if (!p.peripheral_rates.empty()) {
      pj["peripheral_rates"] = json::object();
      for (const auto& [c, rate] : p.peripheral_rates) pj["peripheral_rates"][std::string(corpus::code(c))] = rate;
    }
    j["patterns"].push_back(std::move(pj));
  }
  j["effects"] = json::array();
  for (const auto& e : s.effects) {
    json ej{{"baseline", e.baseline},
            {"combination", vector_to_json(e.combination)},
            {"indicator", std::string(corpus::indicator_name(e.indicator))},
            {"beta", e.beta}};
    if (e.tier) ej["tier"] = std::string(tiers::tier_name(*e.tier));
    j["effects"].push_back(std::move(ej));
  }
  j["baselines"] = json::array();
  for (const auto& b : s.baselines) j["baselines"].push_back(synergy::baseline_to_json(b));
  return j;
}

Generated generate(const GeneratorSpec& spec, unsigned workers) {
  spec.validate();
  Generated out;
  auto& truth = out.truth;

  std::vector<const PatternPopulation*> source;
  for (std::size_t p = 0; p < spec.patterns.size(); ++p) {
    truth.pattern_names.push_back(spec.patterns[p].name);
    for (std::size_t i = 0; i < spec.patterns[p].size; ++i) {
      source.push_back(&spec.patterns[p]);
      truth.labels.push_back(static_cast<int>(p));
    }
  }
  for (std::size_t i = 0; i < spec.uniform_noise; ++i) {
    source.push_back(nullptr);
    truth.labels.push_back(-1);
  }
  const std::size_t n = source.size();

  std::vector<std::uint64_t> account_followers(spec.accounts);
  {
    Rng rng(derive_seed(spec.seed, "synthgen/followers"));
    for (auto& f : account_followers) f = to_count(std::exp(rng.normal(spec.follower_mu, spec.follower_sigma)));
  }

  // Features and accounts first: tier-restricted effects need the partition.
  out.records.resize(n);
  const std::uint64_t feature_base = derive_seed(spec.seed, "synthgen/features");
  parallel_for(n, workers, [&](std::size_t i) {
    Rng rng(index_seed(feature_base, i));
    auto& r = out.records[i];
    r.id = record_id(i);
    const std::size_t account = rng.below(spec.accounts);
    r.account_id = account_id(account);
    r.followers = account_followers[account];
    if (const auto* pop = source[i]) {
      FeatureVector v = pop->prototype;
      for (const auto& [c, rate] : pop->peripheral_rates)
        if (rng.chance(rate)) v.set(c);
      for (std::size_t b = 0; b < corpus::kCategoryCount; ++b)
        if (rng.chance(spec.flip_rate)) v.flip(corpus::category_at(b));
      r.labels = repair(v, pop->prototype);
    } else {
      r.labels = uniform_vector(rng);
    }
  });

  truth.followers = tiers::account_followers(out.records);
  bool need_tiers = false;
  for (const auto& e : spec.effects) need_tiers = need_tiers || e.tier.has_value();
  if (truth.followers.size() >= 3) {
    truth.tier_of = tiers::assign_tiers(truth.followers).tier_of;
  } else if (need_tiers) {
    throw UsageError("tier-restricted effects need at least three accounts with records");
  }

  std::vector<const synergy::BaselinePredicate*> effect_baseline;
  for (const auto& e : spec.effects) effect_baseline.push_back(&synergy::find_baseline(spec.baselines, e.baseline));
  std::vector<std::vector<char>> matched(spec.effects.size(), std::vector<char>(n, 0));

  const std::uint64_t engagement_base = derive_seed(spec.seed, "synthgen/engagement");
  parallel_for(n, workers, [&](std::size_t i) {
    Rng rng(index_seed(engagement_base, i));
    auto& r = out.records[i];
    std::array<double, 3> log_mean{};
    for (Indicator ind : corpus::kIndicators) log_mean[static_cast<std::size_t>(ind)] = spec.engagement[static_cast<std::size_t>(ind)].mu0;
    for (std::size_t e = 0; e < spec.effects.size(); ++e) {
      const auto& eff = spec.effects[e];
      if (!effect_baseline[e]->satisfied_by(r.labels) || !r.labels.contains_all(eff.combination)) continue;
      if (eff.tier && truth.tier_of.at(r.account_id) != *eff.tier) continue;
      log_mean[static_cast<std::size_t>(eff.indicator)] += eff.beta;
      matched[e][i] = 1;
    }
    std::array<std::uint64_t, 3> counts{};
    for (Indicator ind : corpus::kIndicators) {
      const auto k = static_cast<std::size_t>(ind);
      counts[k] = to_count(std::exp(log_mean[k] + spec.engagement[k].sigma0 * rng.normal()) - 1.0);
    }
    r.likes = counts[0];
    r.comments = counts[1];
    r.shares = counts[2];
  });
  for (const auto& m : matched) truth.effect_matches.push_back(static_cast<std::size_t>(std::count(m.begin(), m.end(), 1)));
  return out;
}

json GroundTruth::to_json(const GeneratorSpec& spec, const std::vector<corpus::MessageRecord>& records) const {
  json j;
  j["format"] = "safecomb-truth";
  j["version"] = 1;
  j["spec"] = spec_to_json(spec);
  j["patterns"] = pattern_names;
  j["records"] = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int label = labels[i];
    j["records"].push_back({{"id", records[i].id},
                            {"label", label},
                            {"pattern", label < 0 ? std::string("uniform") : pattern_names[static_cast<std::size_t>(label)]}});
  }
  j["accounts"] = json::object();
  for (const auto& [account, f] : followers) {
    json a{{"followers", f}};
    if (const auto it = tier_of.find(account); it != tier_of.end()) a["tier"] = std::string(tiers::tier_name(it->second));
    j["accounts"][account] = std::move(a);
  }
  j["effects"] = json::array();
  for (std::size_t e = 0; e < spec.effects.size(); ++e) {
    json ej = spec_to_json(spec)["effects"][e];
    ej["matched_records"] = effect_matches[e];
    j["effects"].push_back(std::move(ej));
  }
  return j;
}

std::map<std::string, int> labels_from_truth(const json& truth) {
  if (truth.value("format", "") != "safecomb-truth") throw DataError("not a truth manifest");
  std::map<std::string, int> out;
  for (const auto& r : truth.at("records")) out[r.at("id").get<std::string>()] = r.at("label").get<int>();
  return out;
}

}  // namespace safecomb::synthgen
