#include <png.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support/persistence_oracle.hpp"
#include "topofuse/error.hpp"
#include "topofuse/image_io.hpp"

using namespace topofuse;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "topofuse_test_image_io" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_rgb_png(const fs::path& path, std::size_t w, std::size_t h, std::uint8_t r, std::uint8_t g,
                   std::uint8_t b) {
  std::vector<std::uint8_t> px;
  for (std::size_t i = 0; i < w * h; ++i) px.insert(px.end(), {r, g, b});
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  REQUIRE(png_image_write_to_file(&image, path.c_str(), 0, px.data(), 0, nullptr));
}

}  // namespace

TEST_CASE("GrayImage validates its shape") {
  CHECK_THROWS_AS(GrayImage(0, 3, std::uint8_t{0}), Error);
  CHECK_THROWS_AS(GrayImage(2, 2, std::vector<std::uint8_t>{1, 2, 3}), Error);
}

TEST_CASE("PGM read-back") {
  const fs::path dir = scratch("pgm");
  write_pgm(GrayImage(1, 1, std::vector<std::uint8_t>{5}), dir / "one.pgm");
  CHECK(load_image(dir / "one.pgm") == GrayImage(1, 1, std::vector<std::uint8_t>{5}));

  write_pgm(GrayImage(2, 2, std::vector<std::uint8_t>{0, 255, 128, 64}), dir / "two.pgm");
  CHECK(load_image(dir / "two.pgm").pixels() == std::vector<std::uint8_t>{0, 255, 128, 64});
}

TEST_CASE("PGM round trip is exact for random images") {
  const fs::path dir = scratch("roundtrip");
  CounterRng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const GrayImage img = testing::random_image(rng, 1 + rng.below(40), 1 + rng.below(40), 255);
    write_pgm(img, dir / "x.pgm");
    CHECK(load_image(dir / "x.pgm") == img);
  }
}

TEST_CASE("PGM header comments and bad inputs") {
  const fs::path dir = scratch("pgm_errors");
  {
    std::ofstream out(dir / "comment.pgm", std::ios::binary);
    out << "P5\n# made by hand\n2 1\n255\n" << '\x07' << '\x09';
  }
  CHECK(load_image(dir / "comment.pgm").pixels() == std::vector<std::uint8_t>{7, 9});
  {
    std::ofstream out(dir / "deep.pgm", std::ios::binary);
    out << "P5\n1 1\n65535\n" << '\0' << '\0';
  }
  CHECK_THROWS_WITH_AS(load_image(dir / "deep.pgm"), doctest::Contains("bit depth"), Error);
  {
    std::ofstream out(dir / "empty.pgm", std::ios::binary);
    out << "P5\n0 4\n255\n";
  }
  CHECK_THROWS_WITH_AS(load_image(dir / "empty.pgm"), doctest::Contains("zero-dimension"), Error);
  CHECK_THROWS_AS(load_image(dir / "missing.pgm"), Error);
  {
    std::ofstream out(dir / "junk.png", std::ios::binary);
    out << "not a png";
  }
  CHECK_THROWS_AS(load_image(dir / "junk.png"), Error);
}

TEST_CASE("RGB PNG is reduced by luma") {
  const fs::path dir = scratch("png");
  write_rgb_png(dir / "grey.png", 3, 2, 100, 100, 100);
  const GrayImage img = load_image(dir / "grey.png");
  CHECK(img.width() == 3);
  CHECK(img.height() == 2);
  CHECK(img == GrayImage(3, 2, std::uint8_t{100}));

  write_rgb_png(dir / "red.png", 1, 1, 255, 0, 0);
  CHECK(load_image(dir / "red.png").at(0, 0) == 76);  // round(0.299 * 255) = round(76.245)
}

TEST_CASE("resize") {
  SUBCASE("same size is a no-op") {
    CounterRng rng(1);
    const GrayImage img = testing::random_image(rng, 248, 248, 255);
    CHECK(resize_to(img, 248) == img);
  }
  SUBCASE("constant stays constant") {
    CHECK(resize_to(GrayImage(17, 31, std::uint8_t{100}), 248) == GrayImage(248, 248, std::uint8_t{100}));
  }
  SUBCASE("2x2 ramp upsampled to 4x4") {
    const GrayImage out = resize_to(GrayImage(2, 2, std::vector<std::uint8_t>{0, 255, 0, 255}), 4);
    // Centre-aligned sample positions -0.25, 0.25, 0.75, 1.25 clamp to 0, 0.25, 0.75, 1.
    const std::vector<std::uint8_t> row{0, 64, 191, 255};
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) CHECK(out.at(r, c) == row[c]);
      for (std::size_t c = 1; c < 4; ++c) CHECK(out.at(r, c - 1) <= out.at(r, c));
    }
  }
  SUBCASE("intensity range is preserved") {
    CounterRng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const GrayImage img = testing::random_image(rng, 1 + rng.below(30), 1 + rng.below(30), 255);
      const GrayImage out = resize_to(img, 1 + rng.below(60));
      const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
      const auto [olo, ohi] = std::minmax_element(out.pixels().begin(), out.pixels().end());
      CHECK(*olo >= *lo);
      CHECK(*ohi <= *hi);
    }
  }
  CHECK_THROWS_AS(resize_to(GrayImage(2, 2, std::uint8_t{0}), 0), Error);
}

TEST_CASE("rotations and flips") {
  const GrayImage img(3, 2, std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
  CHECK(rotate90(img) == GrayImage(2, 3, std::vector<std::uint8_t>{4, 1, 5, 2, 6, 3}));
  CHECK(flip_horizontal(img) == GrayImage(3, 2, std::vector<std::uint8_t>{3, 2, 1, 6, 5, 4}));
  CHECK(flip_vertical(img) == GrayImage(3, 2, std::vector<std::uint8_t>{4, 5, 6, 1, 2, 3}));
  CHECK(rotate90(rotate90(rotate90(rotate90(img)))) == img);
}

TEST_CASE("dataset scanning") {
  SUBCASE("four classes in lexicographic order") {
    const fs::path root = scratch("scan4");
    for (const char* name : {"verymild", "non", "moderate", "mild"}) {
      fs::create_directories(root / name);
      write_pgm(GrayImage(3, 3, std::uint8_t{1}), root / name / "a.pgm");
    }
    const ScannedDataset ds = scan_dataset(root, {.side = 8});
    CHECK(ds.class_names == std::vector<std::string>{"mild", "moderate", "non", "verymild"});
    REQUIRE(ds.samples.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(ds.samples[i].label == i);
      CHECK(ds.samples[i].image.width() == 8);
    }
    CHECK(ds.samples[3].sample_id == "verymild/a.pgm");
  }
  SUBCASE("counts and within-class order") {
    const fs::path root = scratch("scan2");
    fs::create_directories(root / "a");
    fs::create_directories(root / "b");
    for (const char* f : {"z.pgm", "m.pgm"}) write_pgm(GrayImage(2, 2, std::uint8_t{3}), root / "a" / f);
    for (const char* f : {"3.pgm", "1.pgm", "2.pgm"}) write_pgm(GrayImage(2, 2, std::uint8_t{4}), root / "b" / f);
    std::ofstream(root / "b" / "notes.txt") << "ignored";
    const ScanOptions opts{.side = 2, .num_classes = 2};
    const ScannedDataset ds = scan_dataset(root, opts);
    std::vector<std::size_t> labels;
    std::vector<std::string> ids;
    for (const auto& s : ds.samples) {
      labels.push_back(s.label);
      ids.push_back(s.sample_id);
    }
    CHECK(labels == std::vector<std::size_t>{0, 0, 1, 1, 1});
    CHECK(ids == std::vector<std::string>{"a/m.pgm", "a/z.pgm", "b/1.pgm", "b/2.pgm", "b/3.pgm"});

    const ScannedDataset again = scan_dataset(root, {.side = 2, .num_classes = 2, .workers = 3});
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
      CHECK(again.samples[i].sample_id == ds.samples[i].sample_id);
      CHECK(again.samples[i].image == ds.samples[i].image);
    }
  }
  SUBCASE("errors") {
    const fs::path root = scratch("scan_err");
    CHECK_THROWS_WITH_AS(scan_dataset(root / "nope", {}), doctest::Contains("does not exist"), Error);
    CHECK_THROWS_WITH_AS(scan_dataset(root, {.num_classes = 0}), doctest::Contains("no class folders"), Error);
    fs::create_directories(root / "full");
    fs::create_directories(root / "hollow");
    write_pgm(GrayImage(2, 2, std::uint8_t{0}), root / "full" / "x.pgm");
    CHECK_THROWS_WITH_AS(scan_dataset(root, {.num_classes = 2}), doctest::Contains("hollow"), Error);
    CHECK_THROWS_WITH_AS(scan_dataset(root, {.num_classes = 4}), doctest::Contains("expected 4"), Error);
    CHECK_THROWS_WITH_AS(scan_dataset(root, {.expected_classes = {"full", "gone"}}), doctest::Contains("gone"), Error);
  }
}
