// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include <cmath>

#include "safecomb/error.hpp"
#include "safecomb/rng.hpp"
#include "safecomb/stats/stats.hpp"

namespace safecomb::stats {

std::vector<BootstrapCI> bootstrap_ci_columns(std::span<const std::vector<double>> columns_with,
                                              std::span<const std::vector<double>> columns_without,
                                              const BootstrapParams& params) {
  if (params.resamples < 1) throw NumericError("bootstrap needs at least one resample");
  if (!(params.level > 0.0 && params.level < 1.0))
    throw NumericError("bootstrap level must lie in (0, 1)");
  if (columns_with.size() != columns_without.size() || columns_with.empty())
    throw NumericError("bootstrap: column count mismatch");
  const std::size_t n_with = columns_with.front().size();
  const std::size_t n_without = columns_without.front().size();
  if (n_with == 0 || n_without == 0) throw NumericError("bootstrap needs two non-empty groups");
  for (std::size_t j = 0; j < columns_with.size(); ++j)
    if (columns_with[j].size() != n_with || columns_without[j].size() != n_without)
      throw NumericError("bootstrap: ragged columns");

  const std::size_t cols = columns_with.size();
  std::vector<std::vector<double>> replicates(cols, std::vector<double>(params.resamples));
  std::vector<double> sum_with(cols), sum_without(cols);
  Rng rng(params.seed);
  for (int r = 0; r < params.resamples; ++r) {
    std::fill(sum_with.begin(), sum_with.end(), 0.0);
    std::fill(sum_without.begin(), sum_without.end(), 0.0);
    for (std::size_t i = 0; i < n_with; ++i) {
      const std::size_t pick = rng.below(n_with);
      for (std::size_t j = 0; j < cols; ++j) sum_with[j] += columns_with[j][pick];
    }
    for (std::size_t i = 0; i < n_without; ++i) {
      const std::size_t pick = rng.below(n_without);
      for (std::size_t j = 0; j < cols; ++j) sum_without[j] += columns_without[j][pick];
    }
    for (std::size_t j = 0; j < cols; ++j)
      replicates[j][r] = sum_with[j] / static_cast<double>(n_with) -
                         sum_without[j] / static_cast<double>(n_without);
  }

  const double tail = (1.0 - params.level) / 2.0;
  std::vector<BootstrapCI> out(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    auto& ci = out[j];
    ci.point = mean_log_diff(columns_with[j], columns_without[j]);
    ci.lo = quantile(replicates[j], tail);
    ci.hi = quantile(std::move(replicates[j]), 1.0 - tail);
    ci.level = params.level;
    ci.resamples = params.resamples;
    ci.seed = params.seed;
  }
  return out;
}

BootstrapCI bootstrap_ci(std::span<const double> group_with, std::span<const double> group_without,
                         const BootstrapParams& params) {
  const std::vector<std::vector<double>> with{{group_with.begin(), group_with.end()}};
  const std::vector<std::vector<double>> without{{group_without.begin(), group_without.end()}};
  return bootstrap_ci_columns(with, without, params).front();
}

}  // namespace safecomb::stats
