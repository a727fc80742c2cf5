// Subcommand implementations behind the `topofuse` executable. Each writes
// its artifacts under `out` and throws topofuse::Error on failure.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "topofuse/run_config.hpp"

namespace topofuse {

struct CommandPaths {
  std::filesystem::path out;
  std::filesystem::path features;    // default: <out>/features.csv
  std::filesystem::path checkpoint;  // default: <out>/checkpoint_<mode>.bin
};

/// Scans the dataset and writes features.csv plus features.meta.json.
void cmd_extract(const RunConfig& cfg, const CommandPaths& paths, std::ostream& log);

/// Splits, trains and writes checkpoint_<mode>.bin and history_<mode>.csv.
void cmd_train(const RunConfig& cfg, const CommandPaths& paths, ModelKind mode, std::ostream& log);

/// Evaluates a checkpoint on the test split: metrics_<mode>.json,
/// confusion_<mode>.csv and roc_<mode>_class<k>.csv.
void cmd_eval(const RunConfig& cfg, const CommandPaths& paths, std::ostream& log);

/// pca_b0.csv, pca_b1.csv, pca_full.csv (with .meta.json sidecars) and
/// distribution.csv.
void cmd_analyze(const RunConfig& cfg, const CommandPaths& paths, std::ostream& log);

/// Synthetic dataset under <out>/ plus <out>/embeddings.csv.
void cmd_synth(const RunConfig& cfg, const CommandPaths& paths, std::ostream& log);

/// Features and metadata as written by cmd_extract.
FeatureDataset load_feature_dataset(const std::filesystem::path& features_csv);

}  // namespace topofuse
