// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/synergy/synergy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "safecomb/error.hpp"
#include "safecomb/parallel.hpp"
#include "safecomb/rng.hpp"

namespace safecomb::synergy {

namespace {

using corpus::Dimension;
using C = Category;

FeatureVector mask_of(std::span<const Category> cats) {
  FeatureVector v;
  for (Category c : cats) v.set(c);
  return v;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  // Avoid "-0.000".
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

Category parse_code(const std::string& text) {
  const auto c = corpus::parse_category(text);
  if (!c) throw UsageError("unknown category: " + text);
  return *c;
}

}  // namespace

bool BaselinePredicate::satisfied_by(FeatureVector v) const noexcept {
  for (const auto& group : required) {
    bool any = false;
    for (Category c : group) any = any || v.test(c);
    if (!any) return false;
  }
  for (Category c : forbidden)
    if (v.test(c)) return false;
  return true;
}

void BaselinePredicate::validate() const {
  if (name.empty()) throw UsageError("baseline needs a name");
  if (required.empty()) throw UsageError("baseline " + name + " has no required categories");
  for (const auto& group : required) {
    if (group.empty()) throw UsageError("baseline " + name + " has an empty required group");
    for (Category c : group)
      if (std::find(forbidden.begin(), forbidden.end(), c) != forbidden.end())
        throw UsageError("baseline " + name + ": " + std::string(corpus::code(c)) + " is both required and forbidden");
  }
  // Satisfiable: pick one member per group and check the dimension rules.
  std::vector<std::size_t> pick(required.size(), 0);
  while (true) {
    FeatureVector v;
    for (std::size_t g = 0; g < required.size(); ++g) v.set(required[g][pick[g]]);
    bool ok = true;
    for (Category c : forbidden) ok = ok && !v.test(c);
    for (std::size_t d = 0; ok && d < corpus::kDimensionCount; ++d) {
      const auto dim = static_cast<Dimension>(d);
      const auto block = v.block(dim);
      if (block.count() > 1 && block.test(corpus::absence_marker(dim))) ok = false;
      if (dim == Dimension::Frame && block.count() > 1) ok = false;
    }
    if (ok) return;
    std::size_t g = 0;
    while (g < pick.size() && ++pick[g] == required[g].size()) pick[g++] = 0;
    if (g == pick.size()) break;
  }
  throw UsageError("baseline " + name + " cannot be satisfied by a valid record");
}

std::string BaselinePredicate::describe() const {
  std::string out;
  for (const auto& group : required) {
    if (!out.empty()) out += '&';
    if (group.size() > 1) out += '(';
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (i) out += '|';
      out += corpus::code(group[i]);
    }
    if (group.size() > 1) out += ')';
  }
  for (Category c : forbidden) out += "&!" + std::string(corpus::code(c));
  return out;
}

std::vector<BaselinePredicate> default_baselines() {
  return {
      {"IAP", {{C::Exp, C::OffM}, {C::ExpEv}}, {}, 2},
      {"NP", {{C::NarrEv}, {C::NoSrc}}, {}, 2},
      {"AA", {{C::NoSrc}, {C::NoEv}}, {}, 2},
      {"CE", {{C::NoApp}, {C::NoEv}}, {}, 2},
  };
}

nlohmann::json baseline_to_json(const BaselinePredicate& b) {
  nlohmann::json required = nlohmann::json::array();
  for (const auto& group : b.required) {
    nlohmann::json g = nlohmann::json::array();
    for (Category c : group) g.push_back(std::string(corpus::code(c)));
    required.push_back(g);
  }
  nlohmann::json forbidden = nlohmann::json::array();
  for (Category c : b.forbidden) forbidden.push_back(std::string(corpus::code(c)));
  return {{"name", b.name}, {"required", required}, {"forbidden", forbidden}, {"core_size", b.core_size}};
}

BaselinePredicate baseline_from_json(const nlohmann::json& j) {
  BaselinePredicate b;
  try {
    b.name = j.at("name").get<std::string>();
    for (const auto& group : j.at("required")) {
      std::vector<Category> g;
      if (group.is_string()) g.push_back(parse_code(group.get<std::string>()));
      else
        for (const auto& c : group) g.push_back(parse_code(c.get<std::string>()));
      b.required.push_back(std::move(g));
    }
    if (j.contains("forbidden"))
      for (const auto& c : j.at("forbidden")) b.forbidden.push_back(parse_code(c.get<std::string>()));
    b.core_size = j.value("core_size", 2);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed baseline: ") + e.what());
  }
  b.validate();
  return b;
}

const BaselinePredicate& find_baseline(std::span<const BaselinePredicate> baselines, const std::string& name) {
  std::string known;
  for (const auto& b : baselines) {
    if (b.name == name) return b;
    known += (known.empty() ? "" : ", ") + b.name;
  }
  throw UsageError("unknown baseline " + name + " (known: " + known + ")");
}

std::vector<Category> peripheral_universe(const BaselinePredicate& baseline) {
  FeatureVector removed = mask_of(baseline.forbidden);
  for (const auto& group : baseline.required) {
    if (group.size() == 1) removed.set(group.front());
    // A group confined to one dimension, without its absence marker, rules
    // the marker out.
    const Dimension dim = corpus::dimension_of(group.front());
    bool same_dimension = true;
    bool has_marker = false;
    for (Category c : group) {
      same_dimension = same_dimension && corpus::dimension_of(c) == dim;
      has_marker = has_marker || corpus::is_absence_marker(c);
    }
    if (!same_dimension) continue;
    if (!has_marker) removed.set(corpus::absence_marker(dim));
    // A required absence marker or frame rules out the rest of the dimension.
    if (group.size() == 1 && (has_marker || dim == Dimension::Frame))
      for (Category c : corpus::categories_of(dim)) removed.set(c);
  }
  std::vector<Category> out;
  for (std::size_t s = 0; s < corpus::kCategoryCount; ++s)
    if (!removed.test(corpus::category_at(s))) out.push_back(corpus::category_at(s));
  return out;
}

bool consistent_combination(FeatureVector s) noexcept {
  for (std::size_t d = 0; d < corpus::kDimensionCount; ++d) {
    const auto dim = static_cast<Dimension>(d);
    const auto block = s.block(dim);
    if (block.count() > 1 && block.test(corpus::absence_marker(dim))) return false;
    if (dim == Dimension::Frame && block.count() > 1) return false;
  }
  return true;
}

double combination_budget(std::size_t universe_size, int k_max) {
  double total = 0.0;
  double term = 1.0;
  for (int k = 1; k <= k_max && static_cast<std::size_t>(k) <= universe_size; ++k) {
    term = term * static_cast<double>(universe_size - static_cast<std::size_t>(k) + 1) / k;
    total += term;
  }
  return total;
}

std::vector<FeatureVector> enumerate_combinations(std::span<const Category> universe, int k_max) {
  std::vector<FeatureVector> out;
  const int u = static_cast<int>(universe.size());
  for (int k = 1; k <= std::min(k_max, u); ++k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      FeatureVector s;
      for (int i : idx) s.set(universe[i]);
      if (consistent_combination(s)) out.push_back(s);
      int i = k - 1;
      while (i >= 0 && idx[i] == u - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

EngagementTable EngagementTable::from_records(std::span<const corpus::MessageRecord> records) {
  EngagementTable t;
  t.vectors.reserve(records.size());
  for (auto& col : t.logs) col.reserve(records.size());
  for (const auto& r : records) {
    t.vectors.push_back(r.labels);
    const auto e = corpus::log_engagement(r);
    for (Indicator i : corpus::kIndicators) t.logs[static_cast<std::size_t>(i)].push_back(e[i]);
  }
  return t;
}

std::string combination_key(const SynergyParams& params, const BaselinePredicate& baseline, FeatureVector s) {
  std::string key = "synergy/";
  if (!params.scope.empty()) key += params.scope + "/";
  return key + baseline.name + "/" + format_combination(s, "+");
}

namespace {

std::vector<std::size_t> population_of(const EngagementTable& table, const BaselinePredicate& baseline) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (baseline.satisfied_by(table.vectors[i])) out.push_back(i);
  return out;
}

std::vector<CombinationEffect> evaluate_in(const EngagementTable& table, const std::vector<std::size_t>& population,
                                           const BaselinePredicate& baseline, FeatureVector s,
                                           std::span<const Indicator> indicators, const SynergyParams& params) {
  std::vector<std::size_t> with, without;
  for (std::size_t i : population) {
    const FeatureVector v = table.vectors[i];
    if (v.contains_all(s)) with.push_back(i);
    else if (params.without == WithoutRule::Complement || (v & s).empty()) without.push_back(i);
  }
  std::vector<CombinationEffect> out;
  for (Indicator ind : indicators) {
    CombinationEffect e;
    e.baseline = baseline.name;
    e.combination = s;
    e.indicator = ind;
    e.n_with = with.size();
    e.n_without = without.size();
    e.degenerate = with.empty() || without.empty();
    out.push_back(std::move(e));
  }
  if (with.empty() || without.empty()) return out;

  // All three columns are resampled together so an effect does not depend
  // on which indicators were requested.
  std::vector<std::vector<double>> cols_with(3), cols_without(3);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i : with) cols_with[c].push_back(table.logs[c][i]);
    for (std::size_t i : without) cols_without[c].push_back(table.logs[c][i]);
  }
  std::vector<stats::BootstrapCI> cis;
  if (with.size() > params.min_n || params.bootstrap_all) {
    stats::BootstrapParams bp = params.bootstrap;
    bp.seed = derive_seed(params.bootstrap.seed, combination_key(params, baseline, s));
    cis = stats::bootstrap_ci_columns(cols_with, cols_without, bp);
  }
  for (auto& e : out) {
    const auto c = static_cast<std::size_t>(e.indicator);
    e.delta_e = stats::mean_log_diff(cols_with[c], cols_without[c]);
    if (!cis.empty()) {
      e.ci = cis[c];
      e.significant = e.n_with > params.min_n && (e.ci->lo > 0.0 || e.ci->hi < 0.0);
    }
  }
  return out;
}

void check_combination(const BaselinePredicate& baseline, FeatureVector s) {
  if (s.empty()) throw UsageError("combination must not be empty");
  if (!consistent_combination(s)) throw UsageError("inconsistent combination " + format_combination(s));
  const auto universe = peripheral_universe(baseline);
  for (Category c : s.categories())
    if (std::find(universe.begin(), universe.end(), c) == universe.end())
      throw UsageError(std::string(corpus::code(c)) + " is outside the peripheral universe of " + baseline.name);
}

}  // namespace

std::vector<CombinationEffect> evaluate_combination(const EngagementTable& table, const BaselinePredicate& baseline,
                                                    FeatureVector s, std::span<const Indicator> indicators,
                                                    const SynergyParams& params) {
  check_combination(baseline, s);
  return evaluate_in(table, population_of(table, baseline), baseline, s, indicators, params);
}

CombinationEffect evaluate_combination(const EngagementTable& table, const BaselinePredicate& baseline,
                                       FeatureVector s, Indicator indicator, const SynergyParams& params) {
  const Indicator one[] = {indicator};
  return evaluate_combination(table, baseline, s, one, params).front();
}

SweepResult sweep(const EngagementTable& table, const BaselinePredicate& baseline,
                  std::span<const Indicator> indicators, const SynergyParams& params) {
  if (params.k_max < 1) throw UsageError("k_max must be >= 1");
  if (indicators.empty()) throw UsageError("no indicators requested");
  SweepResult result;
  result.baseline = baseline.name;
  const auto universe = peripheral_universe(baseline);
  if (universe.empty()) {
    result.warnings.push_back("baseline " + baseline.name + " leaves an empty peripheral universe");
    return result;
  }
  baseline.validate();
  const double budget = combination_budget(universe.size(), params.k_max);
  if (budget > params.combination_cap)
    throw UsageError("baseline " + baseline.name + ": " + std::to_string(universe.size()) + " peripheral categories with k_max " +
                     std::to_string(params.k_max) + " exceed the combination cap; lower k_max");

  const auto population = population_of(table, baseline);
  result.population = population.size();
  const auto combos = enumerate_combinations(universe, params.k_max);
  result.combinations = combos.size();
  if (population.empty()) result.warnings.push_back("no record satisfies baseline " + baseline.name);

  std::vector<std::vector<CombinationEffect>> slots(combos.size());
  parallel_for(combos.size(), params.workers,
               [&](std::size_t c) { slots[c] = evaluate_in(table, population, baseline, combos[c], indicators, params); });

  std::vector<std::pair<std::size_t, CombinationEffect>> flat;
  for (std::size_t c = 0; c < slots.size(); ++c)
    for (auto& e : slots[c]) flat.emplace_back(c, std::move(e));
  std::stable_sort(flat.begin(), flat.end(), [](const auto& a, const auto& b) {
    if (a.second.indicator != b.second.indicator) return a.second.indicator < b.second.indicator;
    const bool da = a.second.delta_e.has_value(), db = b.second.delta_e.has_value();
    if (da != db) return da;
    if (da && *a.second.delta_e != *b.second.delta_e) return *a.second.delta_e > *b.second.delta_e;
    return a.first < b.first;
  });
  for (auto& [c, e] : flat) result.effects.push_back(std::move(e));
  return result;
}

ComplexityCurve complexity_curve(std::span<const CombinationEffect> effects) {
  ComplexityCurve curve;
  std::vector<std::string> order;
  std::map<std::tuple<std::size_t, Indicator, int>, std::vector<double>> groups;
  for (const auto& e : effects) {
    if (!e.significant || !e.delta_e) continue;
    auto it = std::find(order.begin(), order.end(), e.baseline);
    if (it == order.end()) it = order.insert(order.end(), e.baseline);
    groups[{static_cast<std::size_t>(it - order.begin()), e.indicator, e.k()}].push_back(*e.delta_e);
  }
  if (groups.empty()) curve.warnings.push_back("no significant combinations; complexity curve is empty");
  for (const auto& [key, values] : groups) {
    CurvePoint p;
    p.baseline = order[std::get<0>(key)];
    p.indicator = std::get<1>(key);
    p.k = std::get<2>(key);
    p.count = values.size();
    p.mean_delta_e = stats::mean(values);
    if (values.size() >= 2) p.stderr_delta_e = stats::sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
    curve.points.push_back(p);
  }
  return curve;
}

std::string format_combination(std::span<const Category> ordered, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (i) out += separator;
    out += corpus::report_label(ordered[i]);
  }
  return out;
}

std::string format_combination(FeatureVector s, std::string_view separator) {
  const auto cats = s.categories();
  return format_combination(cats, separator);
}

FeatureVector parse_combination(std::string_view text) {
  FeatureVector s;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    s.set(parse_code(token));
    token.clear();
  };
  for (char ch : text) {
    if (ch == '+' || ch == ' ') flush();
    else token += ch;
  }
  flush();
  return s;
}

Extremes extremes(std::span<const CombinationEffect> effects, const std::string& baseline, Indicator indicator,
                  std::size_t count) {
  std::vector<const CombinationEffect*> pool;
  for (const auto& e : effects)
    if (e.baseline == baseline && e.indicator == indicator && e.significant && e.delta_e) pool.push_back(&e);
  // Stable: ties keep sweep order.
  std::stable_sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return *a->delta_e > *b->delta_e; });
  Extremes out;
  for (auto* e : pool)
    if (*e->delta_e > 0.0 && out.positive.size() < count) out.positive.push_back(*e);
  for (auto it = pool.rbegin(); it != pool.rend(); ++it)
    if (*(*it)->delta_e < 0.0 && out.negative.size() < count) out.negative.push_back(**it);
  return out;
}

std::string format_effect_cell(std::span<const CombinationEffect> effects, int decimals, std::string_view separator) {
  if (effects.empty()) return "–";
  std::string out;
  for (const auto& e : effects) {
    if (!out.empty()) out += "; ";
    out += format_combination(e.combination, separator) + " (" + (e.delta_e ? fixed(*e.delta_e, decimals) : "n/a") + ")";
  }
  return out;
}

}  // namespace safecomb::synergy
