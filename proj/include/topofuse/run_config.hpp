// Resolved run configuration shared by every subcommand.
//
// Config files are flat `key = value` text grouped in sections:
//
//   [data]      root, side, classes, num_classes
//   [features]  bins, lo, hi
//   [split]     test_fraction, validation_fraction, seed
//   [model]     trunk_widths, fusion_widths, embedding_dim, dropout
//   [train]     batch_size, epochs, seed, learning_rate, embeddings
//   [synth]     per_class, side, seed, noise, embedding_noise
//
// Lists are comma separated. Command-line overrides use the same
// `section.key=value` spelling.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "topofuse/betti_features.hpp"
#include "topofuse/pipeline.hpp"

namespace topofuse {

struct SynthConfig {
  std::size_t per_class = 200;
  std::size_t side = 64;
  std::uint64_t seed = 3;
  int noise = 20;                // pixel noise amplitude (uniform, +-)
  double embedding_noise = 0.1;  // std-dev added to the one-hot embedding code
};

struct RunConfig {
  std::string dataset_root;
  std::size_t image_side = 248;
  std::vector<std::string> class_names;  // empty: discover
  std::size_t num_classes = 4;
  BinSpec bins{};
  SplitConfig split{};
  std::vector<std::size_t> trunk_widths{800, 256, 128};
  std::vector<std::size_t> fusion_widths{256, 128};
  std::size_t embedding_dim = kEmbeddingDim;
  double dropout = 0.2;
  TrainConfig train{};
  std::string embeddings_path;
  SynthConfig synth{};

  /// Sets one `section.key` entry; throws on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  ClassifierConfig classifier(ModelKind kind) const;
  ScanOptions scan_options() const;

  nlohmann::json to_json() const;
};

/// Defaults overlaid with the file (when given) and then the overrides.
RunConfig load_run_config(const std::filesystem::path& file, const std::vector<std::string>& overrides);

}  // namespace topofuse
