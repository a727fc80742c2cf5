// Seeded synthetic benchmark with topologically distinct classes.
//
// Class k draws k dark annuli (each enclosing one loop) and one to three dark
// filled discs on a bright background, then adds uniform integer noise. Dark
// structures sit near intensity 40 and the background near 200, so for any
// threshold between the two bands the noise-free prototype has beta_1 = k.
#pragma once

#include <filesystem>

#include "topofuse/image_io.hpp"
#include "topofuse/pipeline.hpp"
#include "topofuse/run_config.hpp"

namespace topofuse {

inline constexpr std::uint8_t kSynthForeground = 40;
inline constexpr std::uint8_t kSynthBackground = 200;

struct SynthSample {
  GrayImage prototype;  // noise-free
  GrayImage image;      // prototype + noise
  std::size_t rings;
  std::size_t discs;
};

SynthSample synth_sample(std::size_t label, std::size_t side, int noise, CounterRng& rng);

/// Class folder names, lexicographic in label order.
std::vector<std::string> synth_class_names(std::size_t num_classes);

/// One-hot class code in the first coordinates plus Gaussian noise everywhere.
std::vector<double> noisy_one_hot(std::size_t label, std::size_t dim, double sigma, CounterRng& rng);

/// Writes `<out>/<class>/img_NNNN.pgm` for every class and returns the
/// matching noisy one-hot embedding table keyed by sample id.
EmbeddingTable write_synth_dataset(const SynthConfig& cfg, std::size_t num_classes, std::size_t embedding_dim,
                                   const std::filesystem::path& out);

}  // namespace topofuse
