#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "seizure/eval.hpp"

using namespace seizure;

namespace {
constexpr auto P0 = LabelClass::Pre0to15;
constexpr auto P15 = LabelClass::Pre15to30;
constexpr auto P30 = LabelClass::Pre30to45;
constexpr auto P45 = LabelClass::Pre45to60;
constexpr auto I = LabelClass::Interictal;
}  // namespace

TEST_CASE("confusion counts and normalization") {
  const std::vector<LabelClass> labels = {P0, P0, P15, I, I};
  const std::vector<LabelClass> preds = {P0, P15, P15, I, P0};
  const auto m = confusion(preds, labels);
  CHECK(m.counts[0][0] == 1);
  CHECK(m.counts[0][1] == 1);
  CHECK(m.counts[4][0] == 1);
  CHECK(m.total() == 5);
  CHECK(m.accuracy() == doctest::Approx(0.6));
  const auto n = m.normalized();
  CHECK(n[0][0] == 0.5);
  CHECK_FALSE(n[2][2].has_value());  // no Pre30to45 windows
  CHECK_THROWS_AS(confusion(preds, std::vector<LabelClass>{P0}), std::invalid_argument);
}

TEST_CASE("binary collapse treats every preictal bin as positive") {
  const std::vector<LabelClass> labels = {P0, P45, P30, I, I, I};
  const std::vector<LabelClass> preds = {P45, I, P30, P15, I, I};
  const auto b = collapse_binary(preds, labels);
  CHECK(b.tp == 2);
  CHECK(b.fn == 1);
  CHECK(b.fp == 1);
  CHECK(b.tn == 2);
  CHECK(*b.sensitivity == doctest::Approx(2.0 / 3.0));
  CHECK(*b.specificity == doctest::Approx(2.0 / 3.0));
  CHECK(b == collapse_binary(confusion(preds, labels)));

  const auto none = collapse_binary(std::vector<LabelClass>{I}, std::vector<LabelClass>{I});
  CHECK_FALSE(none.sensitivity.has_value());
  CHECK(*none.specificity == 1.0);
}

TEST_CASE("collapse agrees with the pairwise oracle on random sets") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 50; ++n) {
    std::vector<LabelClass> p, y;
    for (std::size_t i = 0; i < 1 + rng() % 100; ++i) {
      p.push_back(label_from_code(static_cast<int>(rng() % 5)));
      y.push_back(label_from_code(static_cast<int>(rng() % 5)));
    }
    CHECK(collapse_binary(p, y) == oracle::collapse(p, y));
  }
}

TEST_CASE("trend is per-bin detection rate in onset order") {
  const std::vector<LabelClass> labels = {P45, P45, P30, P15, P0, I};
  const std::vector<LabelClass> preds = {P0, I, P30, I, P0, P0};
  const auto t = accuracy_trend(preds, labels);
  CHECK(t.accuracy[0] == 0.5);  // Pre45to60: one of two flagged
  CHECK(t.accuracy[1] == 1.0);
  CHECK(t.accuracy[2] == 0.0);
  CHECK(t.accuracy[3] == 1.0);
  const auto empty = accuracy_trend(std::vector<LabelClass>{I}, std::vector<LabelClass>{I});
  CHECK_FALSE(empty.accuracy[0].has_value());
}

TEST_CASE("aggregation is an unweighted mean over defined values") {
  std::vector<BinaryMetrics> folds(3);
  folds[0].sensitivity = 1.0;
  folds[1].sensitivity = 0.5;
  folds[0].accuracy = 0.9;
  const auto a = aggregate(folds);
  CHECK(*a.sensitivity == 0.75);
  CHECK(*a.accuracy == 0.9);
  CHECK_FALSE(a.specificity.has_value());
  CHECK_THROWS_AS(aggregate(std::span<const BinaryMetrics>{}), std::invalid_argument);
}

TEST_CASE("mean_defined does not depend on input order") {
  std::mt19937_64 rng(3);
  std::vector<MaybeReal> v;
  for (int i = 0; i < 200; ++i) v.push_back(std::uniform_real_distribution<double>(0, 1e6)(rng));
  v.push_back(std::nullopt);
  const auto first = mean_defined(v);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(mean_defined(v) == first);
  }
}

TEST_CASE("matrix aggregation averages rows that exist") {
  ConfusionMatrix a, b;
  a.counts[0][0] = 1;
  a.counts[0][1] = 1;
  b.counts[0][0] = 1;
  b.counts[4][4] = 2;
  const std::vector<ConfusionMatrix> both = {a, b};
  const auto m = aggregate(both);
  CHECK(*m[0][0] == 0.75);
  CHECK(*m[0][1] == 0.25);
  CHECK(*m[4][4] == 1.0);
  CHECK_FALSE(m[2][2].has_value());
}
