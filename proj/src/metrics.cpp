#include "topofuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "topofuse/error.hpp"

namespace topofuse {

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = i;
  return best;
}

std::vector<std::size_t> argmax_rows(const Matrix& probs) {
  std::vector<std::size_t> out(probs.rows());
  for (std::size_t b = 0; b < probs.rows(); ++b) out[b] = argmax(probs.row(b));
  return out;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                                 std::size_t n_classes) {
  if (truth.size() != predicted.size()) throw Error("truth and prediction lengths differ");
  ConfusionMatrix m(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= n_classes || predicted[i] >= n_classes) {
      throw Error("label out of range at sample " + std::to_string(i));
    }
    ++m[truth[i]][predicted[i]];
  }
  return m;
}

PrfScores prf_macro(const ConfusionMatrix& confusion) {
  const std::size_t k = confusion.size();
  PrfScores s;
  for (std::size_t c = 0; c < k; ++c) {
    const double tp = static_cast<double>(confusion[c][c]);
    double fp = 0.0;
    double fn = 0.0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += static_cast<double>(confusion[o][c]);
      fn += static_cast<double>(confusion[c][o]);
    }
    const double p = tp + fp == 0.0 ? 0.0 : tp / (tp + fp);
    const double r = tp + fn == 0.0 ? 0.0 : tp / (tp + fn);
    const double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    s.per_class_precision.push_back(p);
    s.per_class_recall.push_back(r);
    s.per_class_f1.push_back(f);
  }
  if (k > 0) {
    const auto mean = [k](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(k);
    };
    s.precision = mean(s.per_class_precision);
    s.recall = mean(s.per_class_recall);
    s.f1 = mean(s.per_class_f1);
  }
  return s;
}

double mann_whitney_auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) return std::numeric_limits<double>::quiet_NaN();
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  for (const double s : positives) all.push_back({s, true});
  for (const double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // Sum of midranks of positives (ranks are 1-based; doubled to stay integral).
  double twice_rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < all.size() && all[j].score == all[i].score) {
      pos_in_group += all[j].positive ? 1 : 0;
      ++j;
    }
    const double twice_midrank = static_cast<double>(i + 1 + j);
    twice_rank_sum += twice_midrank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double p = static_cast<double>(positives.size());
  const double n = static_cast<double>(negatives.size());
  return (twice_rank_sum / 2.0 - p * (p + 1.0) / 2.0) / (p * n);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw Error("score and label lengths differ");
  const auto total_pos = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  const auto total_neg = static_cast<double>(positive.size()) - total_pos;
  std::vector<RocPoint> curve{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  if (total_pos == 0.0 || total_neg == 0.0) return curve;

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    const double threshold = scores[idx[i]];
    while (i < idx.size() && scores[idx[i]] == threshold) {
      (positive[idx[i]] ? tp : fp) += 1.0;
      ++i;
    }
    curve.push_back({fp / total_neg, tp / total_pos, threshold});
  }
  return curve;
}

RocAuc roc_auc_ovr(std::span<const std::size_t> truth, const Matrix& probs) {
  if (truth.size() != probs.rows()) throw Error("truth and probability rows differ in count");
  const std::size_t k = probs.cols();
  RocAuc out;
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> pos;
    std::vector<double> neg;
    std::vector<double> column(truth.size());
    std::vector<bool> is_pos(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] >= k) throw Error("label out of range at sample " + std::to_string(i));
      column[i] = probs(i, c);
      is_pos[i] = truth[i] == c;
      (is_pos[i] ? pos : neg).push_back(column[i]);
    }
    const bool ok = !pos.empty() && !neg.empty();
    const double auc = mann_whitney_auc(pos, neg);
    out.auc_per_class.push_back(auc);
    out.defined.push_back(ok);
    out.curves.push_back(roc_curve(column, is_pos));
    if (ok) {
      sum += auc;
      ++defined;
    }
  }
  out.macro_auc = defined == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(defined);
  return out;
}

MetricsReport evaluate(std::span<const std::size_t> truth, const Matrix& probs) {
  MetricsReport r;
  r.samples = truth.size();
  const auto predicted = argmax_rows(probs);
  r.confusion = confusion_matrix(truth, predicted, probs.cols());
  std::size_t correct = 0;
  for (std::size_t c = 0; c < r.confusion.size(); ++c) correct += r.confusion[c][c];
  r.accuracy = r.samples == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(r.samples);
  r.prf = prf_macro(r.confusion);
  r.macro_precision = r.prf.precision;
  r.macro_recall = r.prf.recall;
  r.macro_f1 = r.prf.f1;
  r.roc = roc_auc_ovr(truth, probs);
  return r;
}

}  // namespace topofuse
