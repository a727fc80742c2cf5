// Grayscale image loading, resizing and dataset enumeration.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace topofuse {

/// Row-major 8-bit grayscale image.
class GrayImage {
 public:
  GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);
  GrayImage(std::size_t width, std::size_t height, std::uint8_t fill);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  void set(std::size_t row, std::size_t col, std::uint8_t v) { pixels_[row * width_ + col] = v; }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> pixels_;
};

inline constexpr std::size_t kNumClasses = 4;

struct LabeledSample {
  GrayImage image;
  std::size_t label;
  std::string sample_id;  // path relative to the dataset root, '/' separated
};

struct ScannedDataset {
  std::vector<std::string> class_names;
  std::vector<LabeledSample> samples;
};

/// Reads an 8-bit PNG or binary PGM (P5). Colour inputs are reduced with
/// integer luma round(0.299 R + 0.587 G + 0.114 B); alpha is ignored.
GrayImage load_image(const std::filesystem::path& path);

void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Square bilinear resize (pixel-centre aligned), rounded half up.
GrayImage resize_to(const GrayImage& img, std::size_t side);

/// Rotations and flips used by the invariance checks.
GrayImage rotate90(const GrayImage& img);
GrayImage flip_horizontal(const GrayImage& img);
GrayImage flip_vertical(const GrayImage& img);

struct ScanOptions {
  std::size_t side = 248;
  /// When non-empty, exactly these class folders must exist.
  std::vector<std::string> expected_classes;
  /// Required class count when expected_classes is empty; 0 disables the check.
  std::size_t num_classes = kNumClasses;
  /// Worker threads used for decoding; 0 means hardware concurrency.
  std::size_t workers = 0;
};

/// Enumerates `<root>/<class>/<image>`; classes are labelled in lexicographic
/// folder order and files are ordered lexicographically within a class.
ScannedDataset scan_dataset(const std::filesystem::path& root, const ScanOptions& opts);

bool is_image_file(const std::filesystem::path& path);

}  // namespace topofuse
