// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include <cmath>
#include <limits>

#include "safecomb/error.hpp"
#include "safecomb/stats/stats.hpp"

namespace safecomb::stats {

AnovaResult anova_f(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw NumericError("ANOVA needs at least two groups");
  std::size_t total = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.empty()) throw NumericError("ANOVA group is empty");
    total += g.size();
    for (double v : g) grand_sum += v;
  }
  if (total <= groups.size()) throw NumericError("ANOVA needs more observations than groups");
  const double grand_mean = grand_sum / static_cast<double>(total);

  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    for (double v : g) ss_within += (v - m) * (v - m);
  }

  AnovaResult r;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(total - groups.size());
  if (ss_within == 0.0) {
    if (ss_between == 0.0) throw NumericError("ANOVA undefined: all observations are equal");
    r.f = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  r.f = (ss_between / r.df_between) / (ss_within / r.df_within);
  r.p_value = f_sf(r.f, r.df_between, r.df_within);
  return r;
}

}  // namespace safecomb::stats
