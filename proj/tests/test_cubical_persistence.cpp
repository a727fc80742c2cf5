#include "doctest.h"
#include "support/persistence_oracle.hpp"
#include "topofuse/cubical_persistence.hpp"

using namespace topofuse;
using topofuse::testing::oracle_persistence;

namespace {

PersistenceDiagram diagram(int dim, std::vector<PersistencePair> pairs) {
  PersistenceDiagram pd{dim, std::move(pairs)};
  pd.normalize();
  return pd;
}

constexpr std::optional<int> kInf = std::nullopt;

}  // namespace

TEST_CASE("filtration cell counts and T-construction values") {
  const GrayImage img(5, 3, std::vector<std::uint8_t>{9, 4, 7, 1, 3, 0, 2, 8, 6, 5, 4, 4, 9, 9, 1});
  const CubicalFiltration f = build_sublevel_filtration(img);
  const auto counts = f.counts_by_dimension();
  const std::size_t h = 3, w = 5;
  CHECK(counts[0] == (h + 1) * (w + 1));
  CHECK(counts[1] == h * (w + 1) + w * (h + 1));
  CHECK(counts[2] == h * w);

  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) CHECK(f.value(f.square_of(i, j)) == img.at(i, j));

  for (std::size_t cell = 0; cell < f.cell_count(); ++cell) {
    for (const auto face : f.boundary(cell)) CHECK(f.value(face) <= f.value(cell));
    if (f.dimension(cell) == 2) continue;
    // Lower cells take the minimum over the squares around them.
    int expected = 256;
    const long r = static_cast<long>(f.row_of(cell));
    const long c = static_cast<long>(f.col_of(cell));
    for (long rr = r - 1; rr <= r + 1; ++rr)
      for (long cc = c - 1; cc <= c + 1; ++cc)
        if (rr >= 0 && cc >= 0 && rr < static_cast<long>(f.grid_rows()) && cc < static_cast<long>(f.grid_cols()) &&
            rr % 2 == 1 && cc % 2 == 1)
          expected = std::min(expected, static_cast<int>(f.value(f.cell_at(rr, cc))));
    CHECK(f.value(cell) == expected);
  }
}

TEST_CASE("single pixel complex") {
  const CubicalFiltration f(GrayImage(1, 1, std::vector<std::uint8_t>{5}));
  CHECK(f.counts_by_dimension() == std::array<std::size_t, 3>{4, 4, 1});
  for (std::size_t cell = 0; cell < f.cell_count(); ++cell) CHECK(f.value(cell) == 5);
  const Diagrams d = compute_persistence(f);
  CHECK(d.dim0 == diagram(0, {{5, kInf}}));
  CHECK(d.dim1.pairs.empty());
  CHECK(d == oracle_persistence(f));
}

TEST_CASE("shared faces take the smaller pixel") {
  const CubicalFiltration f(GrayImage(2, 1, std::vector<std::uint8_t>{3, 7}));
  CHECK(f.value(f.square_of(0, 0)) == 3);
  CHECK(f.value(f.square_of(0, 1)) == 7);
  const std::size_t shared_edge = f.cell_at(1, 2);
  CHECK(f.dimension(shared_edge) == 1);
  CHECK(f.value(shared_edge) == 3);
  CHECK(f.value(f.cell_at(0, 2)) == 3);
  CHECK(f.value(f.cell_at(2, 2)) == 3);
  CHECK(f.value(f.cell_at(1, 4)) == 7);
}

TEST_CASE("sublevel sets are nested across thresholds 60, 80, 120") {
  CounterRng rng(60);
  const GrayImage img = testing::random_image(rng, 16, 16, 255);
  const auto m60 = sublevel_mask(img, 60);
  const auto m80 = sublevel_mask(img, 80);
  const auto m120 = sublevel_mask(img, 120);
  for (std::size_t i = 0; i < m60.size(); ++i) {
    CHECK((!m60[i] || m80[i]));
    CHECK((!m80[i] || m120[i]));
  }
  // The complex at t contains exactly the faces of active pixels.
  const CubicalFiltration f(img);
  for (const int t : {60, 80, 120}) {
    for (std::size_t i = 0; i < img.height(); ++i)
      for (std::size_t j = 0; j < img.width(); ++j)
        CHECK((f.value(f.square_of(i, j)) <= t) == static_cast<bool>(sublevel_mask(img, t)[i * img.width() + j]));
  }
}

TEST_CASE("constant image has one eternal component") {
  for (const std::uint8_t c : {0, 17, 255}) {
    const Diagrams d = compute_persistence(GrayImage(6, 4, c));
    CHECK(d.dim0 == diagram(0, {{c, kInf}}));
    CHECK(d.dim1.pairs.empty());
  }
}

TEST_CASE("1x3 image [5, 100, 8]") {
  const GrayImage img(3, 1, std::vector<std::uint8_t>{5, 100, 8});
  const Diagrams d = compute_persistence(img);
  // Frozen from the brute-force threshold sweep: components at 5 and 8 merge at 100.
  CHECK(d.dim0 == diagram(0, {{5, kInf}, {8, 100}}));
  CHECK(d.dim1.pairs.empty());
  CHECK(d == oracle_persistence(CubicalFiltration(img)));
  for (const int t : {5, 8, 99, 100}) {
    CHECK(testing::count_alive(d.dim0, t) == testing::brute_force_betti(img, t).b0);
  }
}

TEST_CASE("3x3 ring image closes one loop") {
  const GrayImage img = testing::ring_image();
  const Diagrams d = compute_persistence(img);
  CHECK(d.dim0 == diagram(0, {{10, kInf}}));
  CHECK(d.dim1 == diagram(1, {{10, 200}}));
  const CubicalFiltration f(img);
  CHECK(f.cell_count() == 49);
  CHECK(d == oracle_persistence(f));
}

TEST_CASE("diagonal pixels touch at a corner") {
  const GrayImage img(2, 2, std::vector<std::uint8_t>{1, 9, 9, 2});
  const Diagrams d = compute_persistence(img);
  CHECK(d.dim0 == diagram(0, {{1, kInf}}));
  CHECK(d == oracle_persistence(CubicalFiltration(img)));
}

TEST_CASE("oracle equivalence on random small images") {
  CounterRng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + rng.below(8);
    const std::size_t w = 1 + rng.below(8);
    const int max_value = trial % 2 == 0 ? 15 : 255;
    const GrayImage img = testing::random_image(rng, h, w, max_value);
    const CubicalFiltration f(img);
    const Diagrams fast = compute_persistence(f);
    const Diagrams slow = oracle_persistence(f);
    REQUIRE(fast == slow);
  }
}

TEST_CASE("oracle refuses large complexes") {
  CHECK_THROWS_AS(oracle_persistence(CubicalFiltration(GrayImage(20, 20, std::uint8_t{0}))), std::length_error);
}

TEST_CASE("Betti numbers from diagrams match direct counting and Euler characteristic") {
  CounterRng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const GrayImage img = testing::random_image(rng, 10, 10, 40);
    const CubicalFiltration f(img);
    const Diagrams d = compute_persistence(f);
    for (int t = 0; t <= 41; ++t) {
      const int b0 = testing::count_alive(d.dim0, t);
      const int b1 = testing::count_alive(d.dim1, t);
      const auto brute = testing::brute_force_betti(img, t);
      CHECK(b0 == brute.b0);
      CHECK(b1 == brute.b1);
      CHECK(testing::euler_characteristic(f, t) == b0 - b1);
    }
  }
}

TEST_CASE("shifting intensities shifts every finite pair") {
  CounterRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayImage img = testing::random_image(rng, 9, 7, 200);
    const int shift = static_cast<int>(rng.below(56));
    std::vector<std::uint8_t> px = img.pixels();
    for (auto& v : px) v = static_cast<std::uint8_t>(v + shift);
    const Diagrams a = compute_persistence(img);
    const Diagrams b = compute_persistence(GrayImage(img.width(), img.height(), px));
    for (const auto [pa, pb] : {std::pair{&a.dim0, &b.dim0}, std::pair{&a.dim1, &b.dim1}}) {
      REQUIRE(pa->pairs.size() == pb->pairs.size());
      for (std::size_t k = 0; k < pa->pairs.size(); ++k) {
        CHECK(pb->pairs[k].birth == pa->pairs[k].birth + shift);
        CHECK(pb->pairs[k].death.has_value() == pa->pairs[k].death.has_value());
        if (pa->pairs[k].death) CHECK(*pb->pairs[k].death == *pa->pairs[k].death + shift);
      }
    }
  }
}

TEST_CASE("essential classes and repeatability on larger images") {
  CounterRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const GrayImage img = testing::random_image(rng, 40 + trial, 37, 255);
    const Diagrams d = compute_persistence(img);
    CHECK(std::count_if(d.dim0.pairs.begin(), d.dim0.pairs.end(), [](auto& p) { return p.is_essential(); }) == 1);
    CHECK(std::none_of(d.dim1.pairs.begin(), d.dim1.pairs.end(), [](auto& p) { return p.is_essential(); }));
    for (const auto* pd : {&d.dim0, &d.dim1})
      for (const auto& p : pd->pairs)
        if (p.death) CHECK(p.birth < *p.death);
    CHECK(compute_persistence(img) == d);
  }
}

TEST_CASE("diagram CSV uses inf for essential deaths") {
  const std::string text = diagrams_to_csv(compute_persistence(testing::ring_image()));
  CHECK(text == "dim,birth,death\n0,10,inf\n1,10,200\n");
}
