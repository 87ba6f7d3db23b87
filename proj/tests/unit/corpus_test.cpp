// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "safecomb/corpus/io.hpp"
#include "safecomb/error.hpp"
#include "safecomb/rng.hpp"

using namespace safecomb::corpus;
using Catch::Approx;

namespace {

const std::string kDataDir = SAFECOMB_TEST_DATA_DIR;

Corpus read_string(const std::string& text, Format format, ReadOptions options = {}) {
  std::istringstream in(text);
  return read_corpus(in, format, options);
}

std::string jsonl_row(const std::string& id, const std::string& source, const std::string& frame = "\"Gain\"") {
  return R"({"id":")" + id + R"(","account_id":"a","followers":1,"likes":1,"comments":0,"shares":0,"source":)" +
         source + R"(,"appeal":["Valu"],"frame":)" + frame + R"(,"evidence":["NoEv"]})";
}

// Random record satisfying every dimension invariant.
FeatureVector random_valid(safecomb::Rng& rng) {
  FeatureVector v;
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    const auto dim = static_cast<Dimension>(d);
    const auto cats = categories_of(dim);
    if (dim == Dimension::Frame) {
      v.set(cats[rng.below(cats.size())]);
      continue;
    }
    if (rng.chance(0.25)) {
      v.set(absence_marker(dim));
      continue;
    }
    bool any = false;
    for (Category c : cats)
      if (!is_absence_marker(c) && rng.chance(0.4)) {
        v.set(c);
        any = true;
      }
    if (!any) v.set(cats.front());
  }
  return v;
}

}  // namespace

TEST_CASE("taxonomy has 20 categories over 4 dimensions with unique codes") {
  const auto& table = taxonomy();
  REQUIRE(table.size() == 20);
  std::set<std::string_view> codes;
  std::array<int, 4> per_dim{};
  std::array<int, 4> markers{};
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(slot(table[i].category) == i);
    codes.insert(table[i].code);
    ++per_dim[static_cast<int>(table[i].dimension)];
    if (table[i].absence_marker) ++markers[static_cast<int>(table[i].dimension)];
  }
  CHECK(codes.size() == 20);
  CHECK(per_dim == std::array<int, 4>{3, 9, 3, 5});
  CHECK(markers == std::array<int, 4>{1, 1, 1, 1});
  CHECK(absence_marker(Dimension::Evidence) == Category::NoEv);
}

TEST_CASE("category parsing accepts codes, report labels and long names") {
  CHECK(parse_category("Valu") == Category::Valu);
  CHECK(parse_category("Value") == Category::Valu);
  CHECK(parse_category("Narr") == Category::NarrEv);
  CHECK(parse_category("Hum") == Category::Humor);
  CHECK_FALSE(parse_category("valu").has_value());
  CHECK_FALSE(parse_category("Nope").has_value());
}

TEST_CASE("three-row JSONL fixture reads cleanly") {
  const auto corpus = read_corpus(kDataDir + "/three_rows.jsonl", Format::Jsonl);
  REQUIRE(corpus.records.size() == 3);
  CHECK(corpus.report.accepted == 3);
  CHECK(corpus.report.rejected == 0);
  CHECK(corpus.records[0].id == "p1");
  CHECK(corpus.records[2].id == "p3");
  CHECK(corpus.records[2].source() == std::vector{Category::Exp, Category::OffM});
}

TEST_CASE("absence marker co-occurrence is rejected with a reason") {
  const auto corpus = read_string(jsonl_row("x", R"(["Exp","NoSrc"])"), Format::Jsonl);
  CHECK(corpus.records.empty());
  REQUIRE(corpus.report.rejections.size() == 1);
  CHECK(corpus.report.rejections[0].reason == "absence marker co-occurrence: Source");
  CHECK(corpus.report.rejections[0].line == 1);
}

TEST_CASE("frame is single-choice") {
  const auto corpus = read_string(jsonl_row("x", R"(["Exp"])", R"(["Gain","Loss"])"), Format::Jsonl);
  REQUIRE(corpus.report.rejected == 1);
  CHECK(corpus.report.rejections[0].reason == "frame must hold exactly one category");
}

TEST_CASE("empty dimension: strict rejects, lenient inserts the absence marker") {
  const std::string row = jsonl_row("x", "[]");
  const auto strict = read_string(row, Format::Jsonl);
  CHECK(strict.report.rejected == 1);
  CHECK(strict.report.rejections[0].reason == "empty dimension: Source");

  const auto lenient = read_string(row, Format::Jsonl, {.lenient = true});
  REQUIRE(lenient.records.size() == 1);
  CHECK(lenient.records[0].source() == std::vector{Category::NoSrc});
  CHECK(lenient.report.warnings.size() == 1);
}

TEST_CASE("unreadable file throws DataError") {
  CHECK_THROWS_AS(read_corpus("/nonexistent/corpus.jsonl", Format::Jsonl), safecomb::DataError);
  CHECK_THROWS_AS(read_string("id,likes\n1,2\n", Format::Csv), safecomb::DataError);
}

TEST_CASE("CSV input with pipe-separated cells and quoting") {
  const std::string text =
      "id,account_id,followers,likes,comments,shares,source,appeal,frame,evidence\n"
      "c1,\"acc,1\",10,1,2,3,OffM|Exp,Valu|Util,Gain,StatEv|ExpEv\n"
      "c2,acc2,10,-1,2,3,Exp,Valu,Gain,ExpEv\n"
      "c3,acc2,10,1,2,3,Exp,Valu,Gain,Bogus\n";
  const auto corpus = read_string(text, Format::Csv);
  REQUIRE(corpus.records.size() == 1);
  CHECK(corpus.records[0].account_id == "acc,1");
  CHECK(corpus.records[0].labels == FeatureVector{Category::Exp, Category::OffM, Category::Valu, Category::Util,
                                                  Category::Gain, Category::StatEv, Category::ExpEv});
  REQUIRE(corpus.report.rejections.size() == 2);
  CHECK(corpus.report.rejections[0].line == 3);
  CHECK(corpus.report.rejections[1].reason == "unknown code 'Bogus' in Evidence");
}

TEST_CASE("1000-row fixture with 10 planted defects") {
  safecomb::Rng rng(7);
  std::vector<MessageRecord> rows;
  for (int i = 0; i < 990; ++i) {
    MessageRecord r;
    r.id = "r" + std::to_string(i);
    r.account_id = "a" + std::to_string(i % 37);
    r.followers = rng.below(100000);
    r.likes = rng.below(50);
    r.labels = random_valid(rng);
    rows.push_back(r);
  }
  std::ostringstream out;
  write_jsonl(out, rows);
  std::istringstream lines(out.str());
  std::string text, line;
  std::set<int> planted;
  int n = 0;
  const std::vector<std::string> defects = {
      "{not json", R"({"id":"q"})", jsonl_row("d1", R"(["Exp","NoSrc"])"),
      jsonl_row("d2", R"(["Exp"])", R"(["Gain","NoFrm"])"), jsonl_row("d3", R"(["Gain"])"),
      jsonl_row("d4", R"(["Whatever"])"), jsonl_row("r5", R"(["Exp"])"),  // duplicate id
      R"({"id":"d6","account_id":"a","followers":-3,"likes":1,"comments":0,"shares":0,"source":["Exp"],"appeal":["Valu"],"frame":"Gain","evidence":["NoEv"]})",
      jsonl_row("d7", "[]"), R"([1,2,3])"};
  while (std::getline(lines, line)) {
    text += line + "\n";
    ++n;
    if (n % 100 == 50) {
      text += defects[planted.size()] + "\n";
      planted.insert(n);
    }
  }
  const auto corpus = read_string(text, Format::Jsonl);
  CHECK(n + static_cast<int>(planted.size()) == 1000);
  CHECK(corpus.report.accepted == 990);
  CHECK(corpus.report.rejected == 10);
  CHECK(corpus.records.size() == 990);
  for (const auto& issue : corpus.report.rejections) CHECK_FALSE(issue.reason.empty());
  const auto json = corpus.report.to_json();
  CHECK(json["rejections"].size() == 10);
}

TEST_CASE("encode_features examples") {
  MessageRecord r;
  r.labels = FeatureVector{Category::NoSrc, Category::NoApp, Category::NoFrm, Category::NoEv};
  const auto absent = encode_features(r);
  CHECK(absent.count() == 4);
  for (std::size_t d = 0; d < kDimensionCount; ++d) CHECK(absent.block(static_cast<Dimension>(d)).count() == 1);

  const FeatureVector c16{Category::Exp, Category::Valu, Category::Gain, Category::ExpEv};
  CHECK(c16.count() == 4);
  CHECK(c16.to_bitstring() == "10000010000010000100");

  const FeatureVector c20{Category::OffM, Category::Exp, Category::Valu, Category::Gain, Category::StatEv};
  CHECK(c20.count() == 5);
  CHECK(c20.block(Dimension::Source).count() == 2);
  CHECK(validate_features(c20).empty());
}

TEST_CASE("encoding is a bijection on valid label sets") {
  safecomb::Rng rng(11);
  std::set<std::uint32_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const FeatureVector v = random_valid(rng);
    REQUIRE(validate_features(v).empty());
    const auto decoded = decode_features(v);
    std::vector<Category> all;
    for (const auto* part : {&decoded.source, &decoded.appeal, &decoded.frame, &decoded.evidence})
      all.insert(all.end(), part->begin(), part->end());
    CHECK(FeatureVector::from(all) == v);
    CHECK(decode_features(FeatureVector::from(all)) == decoded);
    seen.insert(v.bits());
  }
  CHECK(seen.size() > 100);
}

TEST_CASE("log_engagement") {
  MessageRecord r;
  auto e = log_engagement(r);
  CHECK(e.likes_log == 0.0);
  CHECK(e.comments_log == 0.0);
  CHECK(e.shares_log == 0.0);

  r.likes = 1;
  r.comments = 3;
  e = log_engagement(r);
  CHECK(e.likes_log == Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(e.comments_log == Approx(1.3862943611198906).epsilon(1e-15));
  CHECK(e.shares_log == 0.0);

  for (std::uint64_t a = 0; a < 200; ++a) CHECK(log1p_count(a) < log1p_count(a + 1));
  CHECK(log1p_count(2) < log1p_count(5));
}

TEST_CASE("re-reading a re-serialized corpus yields identical records") {
  const auto first = read_corpus(kDataDir + "/three_rows.jsonl", Format::Jsonl);
  for (Format f : {Format::Jsonl, Format::Csv}) {
    std::stringstream buffer;
    if (f == Format::Jsonl)
      write_jsonl(buffer, first.records);
    else
      write_csv(buffer, first.records);
    const auto second = read_corpus(buffer, f);
    CHECK(second.records == first.records);
    std::stringstream again;
    if (f == Format::Jsonl)
      write_jsonl(again, second.records);
    else
      write_csv(again, second.records);
    CHECK(again.str() == buffer.str());
  }
}

TEST_CASE("indicator list parsing") {
  CHECK(parse_indicator_list("likes,shares") == std::vector{Indicator::Likes, Indicator::Shares});
  CHECK_THROWS_AS(parse_indicator_list("likes,views"), safecomb::UsageError);
}
