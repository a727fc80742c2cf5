// Classification metrics: confusion matrix, macro precision/recall/F1 and
// one-vs-rest ROC-AUC.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "topofuse/neural.hpp"

namespace topofuse {

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;  // [true][predicted]

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> row);
std::vector<std::size_t> argmax_rows(const Matrix& probs);

ConfusionMatrix confusion_matrix(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                                 std::size_t n_classes);

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<double> per_class_precision;
  std::vector<double> per_class_recall;
  std::vector<double> per_class_f1;
};

/// Unweighted means over classes; a zero denominator contributes 0.
PrfScores prf_macro(const ConfusionMatrix& confusion);

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;  // +inf for the initial (0, 0) point
};

struct RocAuc {
  std::vector<double> auc_per_class;       // NaN for skipped classes
  std::vector<bool> defined;               // false: no positives or no negatives
  double macro_auc = 0.0;                  // mean over defined classes (NaN if none)
  std::vector<std::vector<RocPoint>> curves;
};

/// Mann-Whitney AUC of one score column (ties count 1/2).
double mann_whitney_auc(std::span<const double> positives, std::span<const double> negatives);

/// ROC points at every distinct threshold, from (0,0) to (1,1).
std::vector<RocPoint> roc_curve(std::span<const double> scores, const std::vector<bool>& positive);

RocAuc roc_auc_ovr(std::span<const std::size_t> truth, const Matrix& probs);

struct MetricsReport {
  std::size_t samples = 0;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  PrfScores prf;
  RocAuc roc;
  ConfusionMatrix confusion;
};

MetricsReport evaluate(std::span<const std::size_t> truth, const Matrix& probs);

}  // namespace topofuse
