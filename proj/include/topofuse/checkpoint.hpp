// Versioned binary checkpoints.
//
// Layout (all integers and doubles little-endian):
//   8 bytes   magic "TOPOFCKP"
//   u32       format version (1)
//   u64       header length L
//   L bytes   UTF-8 JSON header: classifier config, layer shapes, epoch,
//             class names, Adam hyperparameters and step, run config
//   f64[]     parameters: for each trunk layer then each head layer,
//             weights (out x in, row-major) followed by biases
//   f64[]     Adam first moments, same order and sizes
//   f64[]     Adam second moments, same order and sizes
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "topofuse/pipeline.hpp"

namespace topofuse {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Classifier model;
  AdamState optimizer;
  std::size_t epoch = 0;
  std::vector<std::string> class_names;
  nlohmann::json run_config = nlohmann::json::object();
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json to_json(const ClassifierConfig& cfg);
ClassifierConfig classifier_config_from_json(const nlohmann::json& j);

}  // namespace topofuse
