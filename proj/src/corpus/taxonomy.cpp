// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/corpus/taxonomy.hpp"

#include <utility>

namespace safecomb::corpus {

namespace {

using enum Category;
using D = Dimension;

constexpr std::array<CategoryInfo, kCategoryCount> kTable{{
    {Exp, D::Source, "Exp", "Exp", "Expert Source", false},
    {OffM, D::Source, "OffM", "OffM", "Official Media", false},
    {NoSrc, D::Source, "NoSrc", "NoSrc", "No Source", true},
    {Sex, D::Appeal, "Sex", "Sex", "Sex Appeal", false},
    {Fear, D::Appeal, "Fear", "Fear", "Fear Appeal", false},
    {Humor, D::Appeal, "Humor", "Hum", "Humor Appeal", false},
    {Valu, D::Appeal, "Valu", "Valu", "Value Appeal", false},
    {Util, D::Appeal, "Util", "Util", "Utilitarian Appeal", false},
    {Dual, D::Appeal, "Dual", "Dual", "Dual Appeal", false},
    {Comp, D::Appeal, "Comp", "Comp", "Comparative Appeal", false},
    {Met, D::Appeal, "Met", "Met", "Metaphor Appeal", false},
    {NoApp, D::Appeal, "NoApp", "NoApp", "No Appeal", true},
    {Gain, D::Frame, "Gain", "Gain", "Gain Frame", false},
    {Loss, D::Frame, "Loss", "Loss", "Loss Frame", false},
    {NoFrm, D::Frame, "NoFrm", "NoFrm", "No Frame", true},
    {NarrEv, D::Evidence, "NarrEv", "Narr", "Narrative Evidence", false},
    {StatEv, D::Evidence, "StatEv", "Stat", "Statistical Evidence", false},
    {ExpEv, D::Evidence, "ExpEv", "ExpEv", "Expert Evidence", false},
    {CausEv, D::Evidence, "CausEv", "Caus", "Causal Evidence", false},
    {NoEv, D::Evidence, "NoEv", "NoEv", "No Evidence", true},
}};

// Extra spellings seen in exports and in the published tables.
constexpr std::array<std::pair<std::string_view, Category>, 12> kAliases{{
    {"Expert", Exp},
    {"OfficialMedia", OffM},
    {"Value", Valu},
    {"Utilitarian", Util},
    {"Comparative", Comp},
    {"Metaphor", Met},
    {"Hum", Humor},
    {"Narr", NarrEv},
    {"Narrative", NarrEv},
    {"Stat", StatEv},
    {"Caus", CausEv},
    {"Causal", CausEv},
}};

}  // namespace

const std::array<CategoryInfo, kCategoryCount>& taxonomy() noexcept { return kTable; }

const CategoryInfo& info(Category c) noexcept { return kTable[slot(c)]; }
std::string_view code(Category c) noexcept { return info(c).code; }
std::string_view report_label(Category c) noexcept { return info(c).report_label; }
Dimension dimension_of(Category c) noexcept { return info(c).dimension; }

std::string_view dimension_name(Dimension d) noexcept {
  switch (d) {
    case D::Source: return "Source";
    case D::Appeal: return "Appeal";
    case D::Frame: return "Frame";
    case D::Evidence: return "Evidence";
  }
  return "?";
}

Category absence_marker(Dimension d) noexcept {
  switch (d) {
    case D::Source: return NoSrc;
    case D::Appeal: return NoApp;
    case D::Frame: return NoFrm;
    case D::Evidence: return NoEv;
  }
  return NoEv;
}

bool is_absence_marker(Category c) noexcept { return info(c).absence_marker; }

std::vector<Category> categories_of(Dimension d) {
  std::vector<Category> out;
  for (const auto& row : kTable)
    if (row.dimension == d) out.push_back(row.category);
  return out;
}

std::optional<Category> parse_category(std::string_view text) noexcept {
  for (const auto& row : kTable)
    if (row.code == text || row.report_label == text) return row.category;
  for (const auto& [alias, category] : kAliases)
    if (alias == text) return category;
  return std::nullopt;
}

}  // namespace safecomb::corpus
