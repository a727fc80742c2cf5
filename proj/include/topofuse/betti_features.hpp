// Betti-curve vectorisation of persistence diagrams and labelled feature
// datasets built from it.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topofuse/cubical_persistence.hpp"
#include "topofuse/image_io.hpp"

namespace topofuse {

/// Threshold grid: `count` centres spaced evenly over [lo, hi], both ends included.
struct BinSpec {
  std::size_t count = 100;
  double lo = 0.0;
  double hi = 255.0;

  void validate() const;
  double center(std::size_t j) const;  // 0-based
  bool operator==(const BinSpec&) const = default;
};

/// beta_k at each bin centre t: pairs with birth <= t < death.
std::vector<std::uint32_t> betti_curve(const PersistenceDiagram& pd, const BinSpec& bins);

/// beta_0 curve followed by beta_1 curve (2 * bins.count entries).
using FeatureVector = std::vector<std::uint32_t>;

FeatureVector extract_feature_vector(const GrayImage& img, const BinSpec& bins);

struct FeatureDataset {
  std::vector<FeatureVector> features;
  std::vector<std::size_t> labels;
  std::vector<std::string> sample_ids;
  BinSpec bin_spec;
  std::vector<std::string> class_names;

  std::size_t size() const { return features.size(); }
  std::size_t width() const { return 2 * bin_spec.count; }
  void validate() const;
};

/// Row i is the feature vector of samples[i]; extraction runs on `workers`
/// threads (0 = default) without affecting the result.
FeatureDataset build_feature_dataset(const std::vector<LabeledSample>& samples, const BinSpec& bins,
                                     std::vector<std::string> class_names, std::size_t workers = 0);

/// Header `sample_id,label,f000,...`.
void write_feature_csv(const FeatureDataset& ds, const std::filesystem::path& path);

/// Reads features and labels; bin_spec and class_names come from the caller
/// (normally the metadata sidecar).
FeatureDataset read_feature_csv(const std::filesystem::path& path, const BinSpec& bins,
                                std::vector<std::string> class_names);

struct DistributionRow {
  std::string sample_id;
  std::string class_name;
  double beta0_mean;
  double beta1_mean;
};

/// Per-sample mean of the beta_0 and beta_1 blocks, for violin plots.
std::vector<DistributionRow> class_distribution_export(const FeatureDataset& ds);

void write_distribution_csv(const std::vector<DistributionRow>& rows, const std::filesystem::path& path);

}  // namespace topofuse
