#include "topofuse/cubical_persistence.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace topofuse {

CubicalFiltration::CubicalFiltration(const GrayImage& img)
    : width_(img.width()), height_(img.height()) {
  values_.assign(grid_rows() * grid_cols(), std::numeric_limits<Intensity>::max());
  for (std::size_t i = 0; i < height_; ++i) {
    for (std::size_t j = 0; j < width_; ++j) {
      const Intensity v = img.at(i, j);
      const std::size_t r = 2 * i + 1;
      const std::size_t c = 2 * j + 1;
      for (std::size_t rr = r - 1; rr <= r + 1; ++rr)
        for (std::size_t cc = c - 1; cc <= c + 1; ++cc) {
          Intensity& slot = values_[cell_at(rr, cc)];
          slot = std::min(slot, v);
        }
    }
  }
}

std::vector<std::size_t> CubicalFiltration::boundary(std::size_t cell) const {
  const std::size_t r = row_of(cell);
  const std::size_t c = col_of(cell);
  std::vector<std::size_t> faces;
  if (r & 1U) {
    faces.push_back(cell_at(r - 1, c));
    faces.push_back(cell_at(r + 1, c));
  }
  if (c & 1U) {
    faces.push_back(cell_at(r, c - 1));
    faces.push_back(cell_at(r, c + 1));
  }
  std::sort(faces.begin(), faces.end());
  return faces;
}

std::array<std::size_t, 3> CubicalFiltration::counts_by_dimension() const {
  std::array<std::size_t, 3> counts{};
  for (std::size_t cell = 0; cell < cell_count(); ++cell) ++counts[dimension(cell)];
  return counts;
}

std::vector<std::size_t> CubicalFiltration::filtration_order() const {
  // Counting sort on (value, dimension); a stable pass keeps index order.
  constexpr std::size_t kBuckets = 256 * 3;
  std::vector<std::size_t> start(kBuckets + 1, 0);
  auto bucket = [this](std::size_t cell) {
    return static_cast<std::size_t>(values_[cell]) * 3 + static_cast<std::size_t>(dimension(cell));
  };
  for (std::size_t cell = 0; cell < cell_count(); ++cell) ++start[bucket(cell) + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::size_t> order(cell_count());
  for (std::size_t cell = 0; cell < cell_count(); ++cell) order[start[bucket(cell)]++] = cell;
  return order;
}

void PersistenceDiagram::normalize() {
  std::sort(pairs.begin(), pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    if (a.is_essential() != b.is_essential()) return b.is_essential();
    return a.death < b.death;
  });
}

CubicalFiltration build_sublevel_filtration(const GrayImage& img) { return CubicalFiltration(img); }

namespace {

class ElderUnionFind {
 public:
  explicit ElderUnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void attach(std::size_t child_root, std::size_t parent_root) { parent_[child_root] = parent_root; }

 private:
  std::vector<std::size_t> parent_;
};

PersistenceDiagram dimension_zero(const CubicalFiltration& filt) {
  const std::size_t h = filt.height();
  const std::size_t w = filt.width();
  const std::size_t n = h * w;
  std::vector<Intensity> pixel(n);
  for (std::size_t p = 0; p < n; ++p) pixel[p] = filt.value(filt.square_of(p / w, p % w));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pixel[a] < pixel[b]; });

  // Elder key of a component = (birth, creating pixel index); with `order`
  // ascending in exactly that key, comparing positions compares keys.
  std::vector<std::size_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k;

  ElderUnionFind uf(n);
  std::vector<bool> active(n, false);
  PersistenceDiagram pd{0, {}};
  for (const std::size_t p : order) {
    active[p] = true;
    const int v = pixel[p];
    const std::size_t pr = p / w;
    const std::size_t pc = p % w;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const auto nr = static_cast<std::ptrdiff_t>(pr) + dr;
        const auto nc = static_cast<std::ptrdiff_t>(pc) + dc;
        if (nr < 0 || nc < 0 || nr >= static_cast<std::ptrdiff_t>(h) || nc >= static_cast<std::ptrdiff_t>(w)) continue;
        const std::size_t q = static_cast<std::size_t>(nr) * w + static_cast<std::size_t>(nc);
        if (!active[q]) continue;
        std::size_t a = uf.find(p);
        std::size_t b = uf.find(q);
        if (a == b) continue;
        if (rank[a] > rank[b]) std::swap(a, b);  // a is the elder
        const int birth = pixel[b];
        if (birth < v) pd.pairs.push_back({birth, v});
        uf.attach(b, a);
      }
    }
  }
  pd.pairs.push_back({pixel[order.front()], std::nullopt});
  pd.normalize();
  return pd;
}

PersistenceDiagram dimension_one(const CubicalFiltration& filt) {
  const std::vector<std::size_t> order = filt.filtration_order();
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> position(filt.cell_count());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = static_cast<std::uint32_t>(k);

  // pivot_owner[row] = reduced column whose lowest entry is `row`.
  std::vector<std::uint32_t> pivot_owner(order.size(), kNone);
  std::vector<std::vector<std::uint32_t>> reduced;
  std::vector<std::uint32_t> scratch;
  PersistenceDiagram pd{1, {}};
  std::size_t squares = 0;

  for (const std::size_t cell : order) {
    if (filt.dimension(cell) != 2) continue;
    ++squares;
    std::vector<std::uint32_t> column;
    for (const std::size_t face : filt.boundary(cell)) column.push_back(position[face]);
    std::sort(column.begin(), column.end());
    while (!column.empty() && pivot_owner[column.back()] != kNone) {
      const auto& other = reduced[pivot_owner[column.back()]];
      scratch.clear();
      std::set_symmetric_difference(column.begin(), column.end(), other.begin(), other.end(),
                                    std::back_inserter(scratch));
      column.swap(scratch);
    }
    if (column.empty()) continue;
    const std::uint32_t low = column.back();
    pivot_owner[low] = static_cast<std::uint32_t>(reduced.size());
    const int birth = filt.value(order[low]);
    const int death = filt.value(cell);
    if (birth < death) pd.pairs.push_back({birth, death});
    reduced.push_back(std::move(column));
  }
  // The grid is contractible, so every square kills a cycle and no 1-cycle
  // survives: the boundary map on squares has full rank F = E - V + 1.
  if (reduced.size() != squares) {
    throw std::logic_error("boundary reduction left a zero square column");
  }
  pd.normalize();
  return pd;
}

}  // namespace

Diagrams compute_persistence(const CubicalFiltration& filt) {
  return Diagrams{dimension_zero(filt), dimension_one(filt)};
}

Diagrams compute_persistence(const GrayImage& img) { return compute_persistence(CubicalFiltration(img)); }

std::vector<bool> sublevel_mask(const GrayImage& img, int threshold) {
  std::vector<bool> mask(img.pixels().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = img.pixels()[i] <= threshold;
  return mask;
}

std::string diagrams_to_csv(const Diagrams& d) {
  std::ostringstream out;
  out << "dim,birth,death\n";
  for (const PersistenceDiagram* pd : {&d.dim0, &d.dim1}) {
    for (const auto& p : pd->pairs) {
      out << pd->dimension << ',' << p.birth << ',';
      if (p.death) out << *p.death;
      else out << "inf";
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace topofuse
