// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include <map>

#include "safecomb/error.hpp"
#include "safecomb/stats/stats.hpp"

namespace safecomb::stats {

AgreementResult cohen_kappa(std::span<const std::string> labels_a, std::span<const std::string> labels_b) {
  if (labels_a.size() != labels_b.size())
    throw NumericError("cohen_kappa: label lists differ in length");
  if (labels_a.empty()) throw NumericError("cohen_kappa: no labels");
  std::map<std::string, double> margin_a, margin_b;
  double agree = 0.0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    margin_a[labels_a[i]] += 1.0;
    margin_b[labels_b[i]] += 1.0;
    if (labels_a[i] == labels_b[i]) agree += 1.0;
  }
  const auto n = static_cast<double>(labels_a.size());
  double chance = 0.0;
  for (const auto& [label, count] : margin_a) {
    const auto it = margin_b.find(label);
    if (it != margin_b.end()) chance += (count / n) * (it->second / n);
  }
  AgreementResult r;
  r.n = labels_a.size();
  r.accuracy = agree / n;
  r.kappa = chance >= 1.0 ? 1.0 : (r.accuracy - chance) / (1.0 - chance);
  return r;
}

}  // namespace safecomb::stats
