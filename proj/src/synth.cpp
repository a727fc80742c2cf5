#include "topofuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "topofuse/error.hpp"

namespace topofuse {

namespace {

struct Disc {
  double cy, cx, radius;
};

bool overlaps(const Disc& a, const std::vector<Disc>& placed, double gap) {
  return std::any_of(placed.begin(), placed.end(), [&](const Disc& b) {
    return std::hypot(a.cy - b.cy, a.cx - b.cx) < a.radius + b.radius + gap;
  });
}

// Rejection-samples non-overlapping discs; empty result when they do not fit.
std::vector<Disc> place(const std::vector<double>& radii, std::size_t side, CounterRng& rng) {
  std::vector<Disc> placed;
  for (const double r : radii) {
    const double lo = r + 2.0;
    const double hi = static_cast<double>(side) - 1.0 - r - 2.0;
    if (hi <= lo) return {};
    bool ok = false;
    for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
      const Disc d{rng.uniform(lo, hi), rng.uniform(lo, hi), r};
      if (!overlaps(d, placed, 3.0)) {
        placed.push_back(d);
        ok = true;
      }
    }
    if (!ok) return {};
  }
  return placed;
}

}  // namespace

SynthSample synth_sample(std::size_t label, std::size_t side, int noise, CounterRng& rng) {
  if (side < 24) throw Error("synthetic images need side >= 24");
  const std::size_t discs = 1 + static_cast<std::size_t>(rng.below(3));
  const double scale = static_cast<double>(side) / 64.0;
  std::vector<Disc> layout;
  std::vector<double> radii;
  for (int attempt = 0; layout.empty(); ++attempt) {
    if (attempt == 100) throw Error("cannot fit synthetic structures into a " + std::to_string(side) + " image");
    radii.clear();
    for (std::size_t k = 0; k < label; ++k) radii.push_back(scale * rng.uniform(6.0, 10.0));
    for (std::size_t k = 0; k < discs; ++k) radii.push_back(scale * rng.uniform(2.0, 4.0));
    layout = place(radii, side, rng);
  }

  GrayImage proto(side, side, kSynthBackground);
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const Disc& d = layout[k];
    const bool ring = k < label;
    const double inner = d.radius - 2.2 * scale;
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        const double dist = std::hypot(static_cast<double>(r) - d.cy, static_cast<double>(c) - d.cx);
        if (dist <= d.radius && (!ring || dist >= inner)) proto.set(r, c, kSynthForeground);
      }
    }
  }

  GrayImage noisy = proto;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const int delta = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * noise + 1))) - noise;
      noisy.set(r, c, static_cast<std::uint8_t>(std::clamp(proto.at(r, c) + delta, 0, 255)));
    }
  }
  return {std::move(proto), std::move(noisy), label, discs};
}

std::vector<std::string> synth_class_names(std::size_t num_classes) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < num_classes; ++k) names.push_back("rings_" + std::to_string(k));
  return names;
}

std::vector<double> noisy_one_hot(std::size_t label, std::size_t dim, double sigma, CounterRng& rng) {
  if (label >= dim) throw Error("embedding too narrow for the class code");
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = (i == label ? 1.0 : 0.0) + sigma * rng.normal();
  return v;
}

EmbeddingTable write_synth_dataset(const SynthConfig& cfg, std::size_t num_classes, std::size_t embedding_dim,
                                   const std::filesystem::path& out) {
  if (num_classes > 10) throw Error("synthetic generator supports at most 10 classes");
  const auto names = synth_class_names(num_classes);
  const CounterRng base(cfg.seed);
  EmbeddingTable table(embedding_dim);
  for (std::size_t label = 0; label < num_classes; ++label) {
    const auto dir = out / names[label];
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < cfg.per_class; ++i) {
      CounterRng rng = base.split(label).split(i);
      const SynthSample s = synth_sample(label, cfg.side, cfg.noise, rng);
      char file[32];
      std::snprintf(file, sizeof file, "img_%04zu.pgm", i);
      write_pgm(s.image, dir / file);
      CounterRng emb_rng = base.split(1000 + label).split(i);
      table.insert(names[label] + "/" + file, noisy_one_hot(label, embedding_dim, cfg.embedding_noise, emb_rng));
    }
  }
  return table;
}

}  // namespace topofuse
