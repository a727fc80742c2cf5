// Brute-force references for classification metrics.
#pragma once

#include <cstddef>
#include <vector>

#include "topofuse/metrics.hpp"
#include "topofuse/rng.hpp"

namespace topofuse::testing {

// Enumerates every positive/negative pair; ties score 1/2.
inline double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (const double p : pos)
    for (const double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

inline double trapezoid(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  return area;
}

struct HandCounts {
  std::vector<std::size_t> tp, fp, fn;
};

// Tallies TP/FP/FN straight from label pairs.
inline HandCounts hand_counts(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred,
                              std::size_t k) {
  HandCounts h{std::vector<std::size_t>(k), std::vector<std::size_t>(k), std::vector<std::size_t>(k)};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) {
      ++h.tp[truth[i]];
    } else {
      ++h.fp[pred[i]];
      ++h.fn[truth[i]];
    }
  }
  return h;
}

struct ScoredSample {
  std::vector<std::size_t> labels;
  Matrix probs;
};

// Random labelled probability rows. Coarse scores (ties likely) when `coarse`.
inline ScoredSample random_scored(CounterRng& rng, std::size_t n, std::size_t k, bool coarse) {
  ScoredSample s{std::vector<std::size_t>(n), Matrix(n, k)};
  for (std::size_t i = 0; i < n; ++i) {
    s.labels[i] = rng.below(k);
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double v = coarse ? static_cast<double>(1 + rng.below(5)) : rng.uniform() + 1e-3;
      if (c == s.labels[i]) v += coarse ? static_cast<double>(rng.below(3)) : rng.uniform();
      s.probs(i, c) = v;
      total += v;
    }
    for (std::size_t c = 0; c < k; ++c) s.probs(i, c) /= total;
  }
  return s;
}

}  // namespace topofuse::testing
