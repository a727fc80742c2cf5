#include "topofuse/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "topofuse/error.hpp"
#include "topofuse/parallel.hpp"

namespace fs = std::filesystem;

namespace topofuse {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) throw Error("image has a zero dimension");
  if (pixels_.size() != width_ * height_) {
    throw Error("pixel buffer size " + std::to_string(pixels_.size()) + " does not match " +
                std::to_string(width_) + "x" + std::to_string(height_));
  }
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::uint8_t fill)
    : GrayImage(width, height, std::vector<std::uint8_t>(width * height, fill)) {}

namespace {

std::uint8_t luma(unsigned r, unsigned g, unsigned b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Skips whitespace and '#' comments between PNM header tokens.
std::size_t read_pnm_number(std::istream& in, const fs::path& path) {
  int c = in.peek();
  while (c != EOF) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
    c = in.peek();
  }
  std::size_t value = 0;
  if (!(in >> value)) throw Error("malformed PGM header in " + path.string());
  return value;
}

GrayImage load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw Error("not a binary PGM (P5): " + path.string());
  }
  const std::size_t width = read_pnm_number(in, path);
  const std::size_t height = read_pnm_number(in, path);
  const std::size_t maxval = read_pnm_number(in, path);
  if (width == 0 || height == 0) throw Error("zero-dimension image: " + path.string());
  if (maxval == 0 || maxval > 255) {
    throw Error("unsupported bit depth (maxval " + std::to_string(maxval) + ") in " + path.string());
  }
  in.get();  // single whitespace byte terminates the header
  std::vector<std::uint8_t> pixels(width * height);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw Error("truncated PGM data in " + path.string());
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage load_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error("cannot read PNG " + path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw Error("unsupported bit depth (16-bit) in " + path.string());
  }
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw Error("zero-dimension image: " + path.string());
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t w = image.width;
  const std::size_t h = image.height;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    throw Error("cannot decode PNG " + path.string() + ": " + image.message);
  }
  if (!color) return GrayImage(w, h, std::move(buffer));
  std::vector<std::uint8_t> gray(w * h);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luma(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]);
  }
  return GrayImage(w, h, std::move(gray));
}

}  // namespace

bool is_image_file(const fs::path& path) {
  const std::string ext = lower_ext(path);
  return ext == ".png" || ext == ".pgm";
}

GrayImage load_image(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error("unreadable file: " + path.string());
  const std::string ext = lower_ext(path);
  if (ext == ".pgm") return load_pgm(path);
  if (ext == ".png") return load_png(path);
  throw Error("unsupported image format: " + path.string());
}

void write_pgm(const GrayImage& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.pixels().size()));
  if (!out) throw Error("write failed: " + path.string());
}

GrayImage resize_to(const GrayImage& img, std::size_t side) {
  if (side == 0) throw Error("resize target must be >= 1");
  if (img.width() == side && img.height() == side) return img;

  struct Tap {
    std::size_t lo, hi;
    double frac;
  };
  auto taps = [side](std::size_t in) {
    std::vector<Tap> out(side);
    const double scale = static_cast<double>(in) / static_cast<double>(side);
    for (std::size_t i = 0; i < side; ++i) {
      double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const auto lo = static_cast<std::size_t>(std::floor(src));
      const std::size_t hi = std::min(lo + 1, in - 1);
      out[i] = {lo, hi, src - static_cast<double>(lo)};
    }
    return out;
  };
  const auto rows = taps(img.height());
  const auto cols = taps(img.width());

  std::vector<std::uint8_t> out(side * side);
  for (std::size_t r = 0; r < side; ++r) {
    const Tap& ty = rows[r];
    for (std::size_t c = 0; c < side; ++c) {
      const Tap& tx = cols[c];
      const double top = (1.0 - tx.frac) * img.at(ty.lo, tx.lo) + tx.frac * img.at(ty.lo, tx.hi);
      const double bottom = (1.0 - tx.frac) * img.at(ty.hi, tx.lo) + tx.frac * img.at(ty.hi, tx.hi);
      const double v = (1.0 - ty.frac) * top + ty.frac * bottom;
      out[r * side + c] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return GrayImage(side, side, std::move(out));
}

GrayImage rotate90(const GrayImage& img) {
  // Clockwise: new(r, c) = old(H - 1 - c, r).
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  std::vector<std::uint8_t> out(w * h);
  for (std::size_t r = 0; r < w; ++r)
    for (std::size_t c = 0; c < h; ++c) out[r * h + c] = img.at(h - 1 - c, r);
  return GrayImage(h, w, std::move(out));
}

GrayImage flip_horizontal(const GrayImage& img) {
  GrayImage out = img;
  for (std::size_t r = 0; r < img.height(); ++r)
    for (std::size_t c = 0; c < img.width(); ++c) out.set(r, c, img.at(r, img.width() - 1 - c));
  return out;
}

GrayImage flip_vertical(const GrayImage& img) {
  GrayImage out = img;
  for (std::size_t r = 0; r < img.height(); ++r)
    for (std::size_t c = 0; c < img.width(); ++c) out.set(r, c, img.at(img.height() - 1 - r, c));
  return out;
}

ScannedDataset scan_dataset(const fs::path& root, const ScanOptions& opts) {
  if (!fs::is_directory(root)) throw Error("dataset root does not exist: " + root.string());

  std::vector<std::string> found;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) found.push_back(entry.path().filename().string());
  }
  std::sort(found.begin(), found.end());

  ScannedDataset ds;
  if (!opts.expected_classes.empty()) {
    for (const auto& name : opts.expected_classes) {
      if (!std::binary_search(found.begin(), found.end(), name)) {
        throw Error("missing class folder: " + (root / name).string());
      }
    }
    ds.class_names = opts.expected_classes;
    std::sort(ds.class_names.begin(), ds.class_names.end());
  } else {
    ds.class_names = found;
  }
  if (ds.class_names.empty()) throw Error("no class folders under " + root.string());
  if (opts.expected_classes.empty() && opts.num_classes != 0 &&
      ds.class_names.size() != opts.num_classes) {
    std::ostringstream msg;
    msg << "expected " << opts.num_classes << " class folders under " << root.string() << ", found "
        << ds.class_names.size() << ":";
    for (const auto& n : ds.class_names) msg << ' ' << n;
    throw Error(msg.str());
  }

  struct Pending {
    fs::path path;
    std::size_t label;
    std::string id;
  };
  std::vector<Pending> pending;
  for (std::size_t label = 0; label < ds.class_names.size(); ++label) {
    const fs::path dir = root / ds.class_names[label];
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) {
        files.push_back(entry.path().filename().string());
      }
    }
    if (files.empty()) throw Error("class folder has no readable images: " + dir.string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      pending.push_back({dir / f, label, ds.class_names[label] + "/" + f});
    }
  }

  std::vector<std::optional<GrayImage>> images(pending.size());
  const std::size_t workers = opts.workers == 0 ? default_worker_count() : opts.workers;
  parallel_for(pending.size(), workers, [&](std::size_t i) {
    images[i] = resize_to(load_image(pending[i].path), opts.side);
  });
  ds.samples.reserve(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    ds.samples.push_back({std::move(*images[i]), pending[i].label, std::move(pending[i].id)});
  }
  return ds;
}

}  // namespace topofuse
