// Sublevel cubical filtrations of grayscale images and their persistence
// diagrams in dimensions 0 and 1.
//
// Cells live on the (2H+1) x (2W+1) doubled grid: a cell at (r, c) has
// dimension (r odd) + (c odd), so pixel (i, j) is the square (2i+1, 2j+1).
// Pixels are top-dimensional cells and every face takes the minimum intensity
// of the squares around it, which makes the sublevel set at t the union of
// the closed pixel squares with intensity <= t.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "topofuse/image_io.hpp"

namespace topofuse {

using Intensity = std::uint8_t;

class CubicalFiltration {
 public:
  explicit CubicalFiltration(const GrayImage& img);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t grid_cols() const { return 2 * width_ + 1; }
  std::size_t grid_rows() const { return 2 * height_ + 1; }
  std::size_t cell_count() const { return values_.size(); }

  std::size_t row_of(std::size_t cell) const { return cell / grid_cols(); }
  std::size_t col_of(std::size_t cell) const { return cell % grid_cols(); }
  std::size_t cell_at(std::size_t row, std::size_t col) const { return row * grid_cols() + col; }

  int dimension(std::size_t cell) const {
    return static_cast<int>(row_of(cell) & 1U) + static_cast<int>(col_of(cell) & 1U);
  }
  Intensity value(std::size_t cell) const { return values_[cell]; }

  /// Faces of codimension one (0, 2 or 4 of them), ascending cell index.
  std::vector<std::size_t> boundary(std::size_t cell) const;

  /// Square cell index of pixel (row, col).
  std::size_t square_of(std::size_t row, std::size_t col) const { return cell_at(2 * row + 1, 2 * col + 1); }

  std::array<std::size_t, 3> counts_by_dimension() const;

  /// Cells sorted by (value, dimension, index): the order in which they
  /// enter the filtration.
  std::vector<std::size_t> filtration_order() const;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<Intensity> values_;
};

/// Birth/death pair; an empty death is the essential class (death = infinity).
struct PersistencePair {
  int birth;
  std::optional<int> death;

  bool is_essential() const { return !death.has_value(); }
  auto operator<=>(const PersistencePair&) const = default;
};

struct PersistenceDiagram {
  int dimension = 0;
  std::vector<PersistencePair> pairs;  // kept sorted (birth, death) with essential last

  void normalize();
  bool operator==(const PersistenceDiagram&) const = default;
};

struct Diagrams {
  PersistenceDiagram dim0{0, {}};
  PersistenceDiagram dim1{1, {}};
  bool operator==(const Diagrams&) const = default;
};

CubicalFiltration build_sublevel_filtration(const GrayImage& img);

/// Dimension 0 by elder-rule union-find over pixels (8-neighbourhood, since
/// closed squares sharing a corner touch); dimension 1 by Z/2 reduction of the
/// square-to-edge boundary matrix. Zero-persistence pairs are dropped.
Diagrams compute_persistence(const CubicalFiltration& filt);

Diagrams compute_persistence(const GrayImage& img);

/// Pixels active at threshold t (intensity <= t), row-major.
std::vector<bool> sublevel_mask(const GrayImage& img, int threshold);

/// CSV dump with columns dim,birth,death; essential deaths are written as `inf`.
std::string diagrams_to_csv(const Diagrams& d);

}  // namespace topofuse
