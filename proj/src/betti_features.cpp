#include "topofuse/betti_features.hpp"

#include <fstream>
#include <numeric>

#include "topofuse/csv.hpp"
#include "topofuse/error.hpp"
#include "topofuse/parallel.hpp"

namespace topofuse {

void BinSpec::validate() const {
  if (count < 1) throw Error("bin count must be >= 1");
  if (!(lo < hi)) throw Error("bin range requires lo < hi");
}

double BinSpec::center(std::size_t j) const {
  if (count == 1) return lo;
  return lo + static_cast<double>(j) * (hi - lo) / static_cast<double>(count - 1);
}

std::vector<std::uint32_t> betti_curve(const PersistenceDiagram& pd, const BinSpec& bins) {
  bins.validate();
  std::vector<std::uint32_t> curve(bins.count, 0);
  for (std::size_t j = 0; j < bins.count; ++j) {
    const double t = bins.center(j);
    for (const auto& p : pd.pairs) {
      if (p.birth <= t && (p.is_essential() || t < *p.death)) ++curve[j];
    }
  }
  return curve;
}

FeatureVector extract_feature_vector(const GrayImage& img, const BinSpec& bins) {
  const Diagrams d = compute_persistence(img);
  FeatureVector v = betti_curve(d.dim0, bins);
  const auto b1 = betti_curve(d.dim1, bins);
  v.insert(v.end(), b1.begin(), b1.end());
  return v;
}

void FeatureDataset::validate() const {
  if (labels.size() != features.size() || sample_ids.size() != features.size()) {
    throw Error("feature dataset rows are misaligned");
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != width()) throw Error("feature row " + std::to_string(i) + " has wrong width");
    if (labels[i] >= class_names.size()) throw Error("label out of range in row " + std::to_string(i));
  }
}

FeatureDataset build_feature_dataset(const std::vector<LabeledSample>& samples, const BinSpec& bins,
                                     std::vector<std::string> class_names, std::size_t workers) {
  if (samples.empty()) throw Error("cannot build a feature dataset from zero samples");
  bins.validate();
  FeatureDataset ds;
  ds.bin_spec = bins;
  ds.class_names = std::move(class_names);
  ds.features.resize(samples.size());
  parallel_for(samples.size(), workers == 0 ? default_worker_count() : workers,
               [&](std::size_t i) { ds.features[i] = extract_feature_vector(samples[i].image, bins); });
  for (const auto& s : samples) {
    ds.labels.push_back(s.label);
    ds.sample_ids.push_back(s.sample_id);
  }
  ds.validate();
  return ds;
}

namespace {

std::string feature_column(std::size_t k) {
  std::string digits = std::to_string(k);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "f" + digits;
}

}  // namespace

void write_feature_csv(const FeatureDataset& ds, const std::filesystem::path& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "sample_id,label";
  for (std::size_t k = 0; k < ds.width(); ++k) out << ',' << feature_column(k);
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    csv::require_plain_field(ds.sample_ids[i]);
    out << ds.sample_ids[i] << ',' << ds.labels[i];
    for (const auto v : ds.features[i]) out << ',' << v;
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

FeatureDataset read_feature_csv(const std::filesystem::path& path, const BinSpec& bins,
                                std::vector<std::string> class_names) {
  const csv::Table table = csv::read(path);
  FeatureDataset ds;
  ds.bin_spec = bins;
  ds.class_names = std::move(class_names);
  const std::size_t width = ds.width();
  if (table.header.size() != width + 2 || table.header[0] != "sample_id" || table.header[1] != "label") {
    throw Error(path.string() + ": header does not match " + std::to_string(width) + " feature columns");
  }
  for (std::size_t k = 0; k < width; ++k) {
    if (table.header[k + 2] != feature_column(k)) throw Error(path.string() + ": unexpected column " + table.header[k + 2]);
  }
  for (const auto& row : table.rows) {
    const std::string ctx = path.string() + " row " + row[0];
    const long long label = csv::parse_int(row[1], ctx);
    if (label < 0) throw Error("negative label in " + ctx);
    FeatureVector fv(width);
    for (std::size_t k = 0; k < width; ++k) {
      const long long v = csv::parse_int(row[k + 2], ctx);
      if (v < 0) throw Error("negative Betti number in " + ctx);
      fv[k] = static_cast<std::uint32_t>(v);
    }
    ds.sample_ids.push_back(row[0]);
    ds.labels.push_back(static_cast<std::size_t>(label));
    ds.features.push_back(std::move(fv));
  }
  if (ds.size() == 0) throw Error(path.string() + " contains no samples");
  ds.validate();
  return ds;
}

std::vector<DistributionRow> class_distribution_export(const FeatureDataset& ds) {
  ds.validate();
  const std::size_t n = ds.bin_spec.count;
  std::vector<DistributionRow> rows;
  rows.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& f = ds.features[i];
    const double b0 = std::accumulate(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    const double b1 = std::accumulate(f.begin() + static_cast<std::ptrdiff_t>(n), f.end(), 0.0);
    rows.push_back({ds.sample_ids[i], ds.class_names[ds.labels[i]], b0 / static_cast<double>(n),
                    b1 / static_cast<double>(n)});
  }
  return rows;
}

void write_distribution_csv(const std::vector<DistributionRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "sample_id,class,beta0_mean,beta1_mean\n";
  for (const auto& r : rows) {
    out << r.sample_id << ',' << r.class_name << ',' << csv::format_double(r.beta0_mean) << ','
        << csv::format_double(r.beta1_mean) << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace topofuse
