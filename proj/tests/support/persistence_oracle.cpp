#include "persistence_oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <tuple>

namespace topofuse::testing {

Diagrams oracle_persistence(const CubicalFiltration& filt) {
  const std::size_t rows = 2 * filt.height() + 1;
  const std::size_t cols = 2 * filt.width() + 1;
  const std::size_t n = rows * cols;
  if (n > kOracleMaxCells) throw std::length_error("oracle_persistence is for test-scale complexes only");

  auto dim_of = [cols](std::size_t cell) { return static_cast<int>((cell / cols) % 2 + (cell % cols) % 2); };
  std::vector<std::tuple<int, int, std::size_t>> keyed;
  for (std::size_t cell = 0; cell < n; ++cell) keyed.emplace_back(filt.value(cell), dim_of(cell), cell);
  std::sort(keyed.begin(), keyed.end());

  std::vector<std::size_t> pos(n);
  for (std::size_t k = 0; k < n; ++k) pos[std::get<2>(keyed[k])] = k;

  // Dense 0/1 columns indexed by filtration position.
  std::vector<std::vector<char>> matrix(n, std::vector<char>(n, 0));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t cell = std::get<2>(keyed[k]);
    const std::size_t r = cell / cols;
    const std::size_t c = cell % cols;
    if (r % 2 == 1) {
      matrix[k][pos[cell - cols]] = 1;
      matrix[k][pos[cell + cols]] = 1;
    }
    if (c % 2 == 1) {
      matrix[k][pos[cell - 1]] = 1;
      matrix[k][pos[cell + 1]] = 1;
    }
  }
  auto low = [&](std::size_t col) -> long {
    for (std::size_t i = n; i-- > 0;)
      if (matrix[col][i]) return static_cast<long>(i);
    return -1;
  };
  // Left-to-right: add any earlier column with the same low until unique.
  std::vector<long> lows(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    bool changed = true;
    while (changed) {
      changed = false;
      const long l = low(j);
      if (l < 0) break;
      for (std::size_t k = 0; k < j; ++k) {
        if (lows[k] == l) {
          for (std::size_t i = 0; i < n; ++i) matrix[j][i] ^= matrix[k][i];
          changed = true;
          break;
        }
      }
    }
    lows[j] = low(j);
  }

  Diagrams d;
  std::vector<bool> paired(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (lows[j] < 0) continue;
    const auto i = static_cast<std::size_t>(lows[j]);
    paired[i] = paired[j] = true;
    const int birth = std::get<0>(keyed[i]);
    const int death = std::get<0>(keyed[j]);
    if (birth == death) continue;
    const int dim = std::get<1>(keyed[i]);
    (dim == 0 ? d.dim0 : d.dim1).pairs.push_back({birth, death});
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (paired[k]) continue;
    const int dim = std::get<1>(keyed[k]);
    if (dim == 0) d.dim0.pairs.push_back({std::get<0>(keyed[k]), std::nullopt});
    else if (dim == 1) d.dim1.pairs.push_back({std::get<0>(keyed[k]), std::nullopt});
    else throw std::logic_error("essential 2-cycle in a planar complex");
  }
  d.dim0.normalize();
  d.dim1.normalize();
  return d;
}

namespace {

int count_components(std::size_t h, std::size_t w, const std::function<bool(std::size_t, std::size_t)>& member,
                     bool eight, bool skip_border_touching) {
  std::vector<char> seen(h * w, 0);
  int count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t r0 = 0; r0 < h; ++r0) {
    for (std::size_t c0 = 0; c0 < w; ++c0) {
      if (seen[r0 * w + c0] || !member(r0, c0)) continue;
      bool touches = false;
      stack.assign(1, {r0, c0});
      seen[r0 * w + c0] = 1;
      while (!stack.empty()) {
        const auto [r, c] = stack.back();
        stack.pop_back();
        if (r == 0 || c == 0 || r + 1 == h || c + 1 == w) touches = true;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if ((dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0)) continue;
            const long nr = static_cast<long>(r) + dr;
            const long nc = static_cast<long>(c) + dc;
            if (nr < 0 || nc < 0 || nr >= static_cast<long>(h) || nc >= static_cast<long>(w)) continue;
            const auto idx = static_cast<std::size_t>(nr) * w + static_cast<std::size_t>(nc);
            if (seen[idx] || !member(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc))) continue;
            seen[idx] = 1;
            stack.emplace_back(nr, nc);
          }
        }
      }
      if (!(skip_border_touching && touches)) ++count;
    }
  }
  return count;
}

}  // namespace

BettiNumbers brute_force_betti(const GrayImage& img, int t) {
  auto active = [&](std::size_t r, std::size_t c) { return img.at(r, c) <= t; };
  auto inactive = [&](std::size_t r, std::size_t c) { return img.at(r, c) > t; };
  return {count_components(img.height(), img.width(), active, true, false),
          count_components(img.height(), img.width(), inactive, false, true)};
}

long euler_characteristic(const CubicalFiltration& filt, int t) {
  long chi = 0;
  for (std::size_t cell = 0; cell < filt.cell_count(); ++cell) {
    if (filt.value(cell) > t) continue;
    chi += filt.dimension(cell) == 1 ? -1 : 1;
  }
  return chi;
}

int count_alive(const PersistenceDiagram& pd, double t) {
  int n = 0;
  for (const auto& p : pd.pairs)
    if (p.birth <= t && (!p.death || t < *p.death)) ++n;
  return n;
}

GrayImage random_image(CounterRng& rng, std::size_t h, std::size_t w, int max_value) {
  std::vector<std::uint8_t> px(h * w);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(max_value) + 1));
  return GrayImage(w, h, std::move(px));
}

GrayImage ring_image() { return GrayImage(3, 3, {10, 10, 10, 10, 200, 10, 10, 10, 10}); }

}  // namespace topofuse::testing
