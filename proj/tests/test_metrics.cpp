#include <cmath>

#include "doctest.h"
#include "support/metric_oracle.hpp"
#include "topofuse/error.hpp"
#include "topofuse/metrics.hpp"

using namespace topofuse;
using namespace topofuse::testing;

TEST_CASE("argmax ties go low") {
  const std::vector<double> row{0.3, 0.3, 0.4, 0.4};
  CHECK(argmax(row) == 2);
  const std::vector<double> flat{0.25, 0.25, 0.25, 0.25};
  CHECK(argmax(flat) == 0);
}

TEST_CASE("confusion matrix") {
  const std::vector<std::size_t> t{0, 1, 2, 3};
  const auto id = confusion_matrix(t, t, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(id[i][j] == (i == j ? 1u : 0u));

  const std::vector<std::size_t> balanced{0, 0, 1, 1, 2, 2, 3, 3};
  const std::vector<std::size_t> zeros(8, 0);
  const auto col = confusion_matrix(balanced, zeros, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(col[i][0] == 2);
    for (std::size_t j = 1; j < 4; ++j) CHECK(col[i][j] == 0);
  }

  CounterRng rng(1);
  std::vector<std::size_t> truth(100), pred(100);
  std::vector<std::size_t> true_counts(4, 0);
  for (std::size_t i = 0; i < 100; ++i) {
    truth[i] = rng.below(4);
    pred[i] = rng.below(4);
    ++true_counts[truth[i]];
  }
  const auto m = confusion_matrix(truth, pred, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    std::size_t row = 0;
    for (const auto v : m[c]) row += v;
    CHECK(row == true_counts[c]);
  }
  CHECK_THROWS_AS(confusion_matrix(std::vector<std::size_t>{4}, std::vector<std::size_t>{0}, 4), Error);
  CHECK_THROWS_AS(confusion_matrix(std::vector<std::size_t>{0}, std::vector<std::size_t>{7}, 4), Error);
}

TEST_CASE("macro precision recall f1") {
  ConfusionMatrix id(4, std::vector<std::size_t>(4, 0));
  for (std::size_t i = 0; i < 4; ++i) id[i][i] = 5;
  const auto perfect = prf_macro(id);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  const auto s = prf_macro({{3, 1}, {2, 4}});
  CHECK(s.precision == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(s.recall == doctest::Approx((0.75 + 4.0 / 6.0) / 2.0).epsilon(1e-15));
  CHECK(s.recall == doctest::Approx(0.708333).epsilon(1e-6));
  const double f0 = 2 * 0.6 * 0.75 / (0.6 + 0.75);
  const double f1 = 2 * 0.8 * (4.0 / 6.0) / (0.8 + 4.0 / 6.0);
  CHECK(s.f1 == doctest::Approx((f0 + f1) / 2.0).epsilon(1e-15));

  // class 2 never true, never predicted
  const auto z = prf_macro({{2, 0, 0}, {0, 2, 0}, {0, 0, 0}});
  CHECK(z.per_class_precision[2] == 0.0);
  CHECK(z.per_class_recall[2] == 0.0);
  CHECK(z.per_class_f1[2] == 0.0);
  CHECK(z.precision == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("prf agrees with hand counts") {
  CounterRng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng.below(4);
    const std::size_t n = 1 + rng.below(60);
    std::vector<std::size_t> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = rng.below(k);
      pred[i] = rng.bernoulli(0.5) ? truth[i] : rng.below(k);
    }
    const auto h = hand_counts(truth, pred, k);
    const auto s = prf_macro(confusion_matrix(truth, pred, k));
    for (std::size_t c = 0; c < k; ++c) {
      const double tp = static_cast<double>(h.tp[c]);
      const double p = h.tp[c] + h.fp[c] == 0 ? 0.0 : tp / static_cast<double>(h.tp[c] + h.fp[c]);
      const double r = h.tp[c] + h.fn[c] == 0 ? 0.0 : tp / static_cast<double>(h.tp[c] + h.fn[c]);
      CHECK(s.per_class_precision[c] == p);
      CHECK(s.per_class_recall[c] == r);
    }
  }
}

TEST_CASE("AUC examples") {
  CHECK(mann_whitney_auc(std::vector<double>{0.9, 0.4}, std::vector<double>{0.5, 0.1}) == 0.75);
  CHECK(mann_whitney_auc(std::vector<double>{0.9, 0.8}, std::vector<double>{0.5, 0.1}) == 1.0);
  CHECK(mann_whitney_auc(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5}) == 0.5);
  CHECK(std::isnan(mann_whitney_auc(std::vector<double>{}, std::vector<double>{0.5})));

  Matrix perfect(4, 4, 0.0);
  for (std::size_t i = 0; i < 4; ++i) perfect(i, i) = 1.0;
  const std::vector<std::size_t> labels{0, 1, 2, 3};
  const auto r = roc_auc_ovr(labels, perfect);
  for (const double a : r.auc_per_class) CHECK(a == 1.0);
  CHECK(r.macro_auc == 1.0);

  const auto ties = roc_auc_ovr(labels, Matrix(4, 4, 0.25));
  for (const double a : ties.auc_per_class) CHECK(a == 0.5);
  CHECK(ties.curves[0].size() == 2);
}

TEST_CASE("AUC skips classes without positives") {
  const std::vector<std::size_t> labels{0, 0, 1, 1};
  Matrix probs(4, 3, 0.0);
  probs(0, 0) = 0.9, probs(0, 1) = 0.1;
  probs(1, 0) = 0.6, probs(1, 1) = 0.4;
  probs(2, 0) = 0.3, probs(2, 1) = 0.7;
  probs(3, 0) = 0.2, probs(3, 1) = 0.8;
  const auto r = roc_auc_ovr(labels, probs);
  CHECK(r.defined == std::vector<bool>{true, true, false});
  CHECK(std::isnan(r.auc_per_class[2]));
  CHECK(r.macro_auc == 1.0);
}

TEST_CASE("AUC matches pair enumeration and ROC trapezoid") {
  CounterRng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    const auto s = random_scored(rng, n, 4, trial % 2 == 0);
    const auto r = roc_auc_ovr(s.labels, s.probs);
    for (std::size_t c = 0; c < 4; ++c) {
      std::vector<double> pos, neg;
      for (std::size_t i = 0; i < n; ++i) (s.labels[i] == c ? pos : neg).push_back(s.probs(i, c));
      if (pos.empty() || neg.empty()) {
        CHECK_FALSE(r.defined[c]);
        continue;
      }
      const double oracle = pairwise_auc(pos, neg);
      CHECK(std::abs(r.auc_per_class[c] - oracle) <= 1e-12);
      CHECK(std::abs(trapezoid(r.curves[c]) - oracle) <= 1e-12);
      CHECK(r.curves[c].back().fpr == 1.0);
      CHECK(r.curves[c].back().tpr == 1.0);
    }
  }
}

TEST_CASE("metrics are invariant to sample order") {
  CounterRng rng(4);
  const auto s = random_scored(rng, 120, 4, true);
  std::vector<std::size_t> perm(120);
  for (std::size_t i = 0; i < 120; ++i) perm[i] = i;
  rng.shuffle(std::span<std::size_t>(perm));
  ScoredSample p{std::vector<std::size_t>(120), Matrix(120, 4)};
  for (std::size_t i = 0; i < 120; ++i) {
    p.labels[i] = s.labels[perm[i]];
    for (std::size_t c = 0; c < 4; ++c) p.probs(i, c) = s.probs(perm[i], c);
  }
  const auto a = evaluate(s.labels, s.probs);
  const auto b = evaluate(p.labels, p.probs);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.confusion == b.confusion);
  CHECK(a.macro_f1 == b.macro_f1);
  CHECK(a.roc.auc_per_class == b.roc.auc_per_class);
  CHECK(a.roc.macro_auc == b.roc.macro_auc);
}

TEST_CASE("monotone transforms keep a class's AUC") {
  CounterRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_scored(rng, 80, 4, trial % 2 == 0);
    const auto before = roc_auc_ovr(s.labels, s.probs);
    const std::size_t c = rng.below(4);
    for (std::size_t i = 0; i < 80; ++i) s.probs(i, c) = std::exp(3.0 * s.probs(i, c)) - 7.0;
    const auto after = roc_auc_ovr(s.labels, s.probs);
    CHECK(std::abs(before.auc_per_class[c] - after.auc_per_class[c]) <= 1e-12);
  }
}

TEST_CASE("evaluate ties together") {
  const std::vector<std::size_t> labels{0, 1, 2, 3, 0};
  Matrix probs(5, 4, 0.1);
  for (std::size_t i = 0; i < 4; ++i) probs(i, i) = 0.7;
  probs(4, 1) = 0.7;
  const auto r = evaluate(labels, probs);
  CHECK(r.samples == 5);
  CHECK(r.accuracy == doctest::Approx(0.8));
  CHECK(r.confusion[0][1] == 1);
  CHECK(r.macro_precision == r.prf.precision);
}
