#include "topofuse/commands.hpp"

#include <fstream>
#include <ostream>

#include "topofuse/checkpoint.hpp"
#include "topofuse/csv.hpp"
#include "topofuse/error.hpp"
#include "topofuse/metrics.hpp"
#include "topofuse/parallel.hpp"
#include "topofuse/pca.hpp"
#include "topofuse/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace topofuse {

namespace {

constexpr const char* kIntensityScale = "raw 8-bit intensities 0..255";

fs::path features_path(const CommandPaths& p) { return p.features.empty() ? p.out / "features.csv" : p.features; }

fs::path meta_path(const fs::path& artifact) {
  fs::path m = artifact;
  m += ".meta.json";
  return m;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

json bins_json(const BinSpec& b) { return {{"count", b.count}, {"lo", b.lo}, {"hi", b.hi}}; }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::string threshold_text(double t) { return std::isinf(t) ? "inf" : csv::format_double(t); }

}  // namespace

FeatureDataset load_feature_dataset(const fs::path& features_csv) {
  const json meta = read_json(meta_path(features_csv));
  try {
    const auto& b = meta.at("bin_spec");
    BinSpec bins{b.at("count").get<std::size_t>(), b.at("lo").get<double>(), b.at("hi").get<double>()};
    return read_feature_csv(features_csv, bins, meta.at("class_names").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw Error("malformed feature metadata for " + features_csv.string() + ": " + e.what());
  }
}

void cmd_extract(const RunConfig& cfg, const CommandPaths& paths, std::ostream& log) {
  if (cfg.dataset_root.empty()) throw Error("no dataset root: set data.root or pass --dataset");
  ensure_dir(paths.out);
  ScanOptions opts = cfg.scan_options();
  opts.workers = default_worker_count();
  ScannedDataset scanned = scan_dataset(cfg.dataset_root, opts);
  const FeatureDataset ds = build_feature_dataset(scanned.samples, cfg.bins, scanned.class_names, opts.workers);

  const fs::path csv_path = features_path(paths);
  write_feature_csv(ds, csv_path);
  std::vector<std::size_t> counts(ds.class_names.size(), 0);
  for (const auto l : ds.labels) ++counts[l];
  write_json({{"artifact", "features"},
              {"bin_spec", bins_json(ds.bin_spec)},
              {"class_names", ds.class_names},
              {"class_counts", counts},
              {"intensity_scale", kIntensityScale},
              {"samples", ds.size()},
              {"run_config", cfg.to_json()}},
             meta_path(csv_path));
  for (std::size_t c = 0; c < counts.size(); ++c) log << ds.class_names[c] << ": " << counts[c] << " samples\n";
  log << "wrote " << csv_path.string() << '\n';
}

void cmd_train(const RunConfig& cfg, const CommandPaths& paths, ModelKind mode, std::ostream& log) {
  if (mode == ModelKind::Fusion && cfg.embeddings_path.empty()) {
    throw Error("fusion mode requires an embedding file: pass --embeddings (or set train.embeddings)");
  }
  ensure_dir(paths.out);
  const FeatureDataset ds = load_feature_dataset(features_path(paths));
  const ClassifierConfig model_cfg = cfg.classifier(mode);
  if (ds.class_names.size() != model_cfg.num_classes) {
    throw Error("feature file has " + std::to_string(ds.class_names.size()) + " classes but data.num_classes is " +
                std::to_string(model_cfg.num_classes));
  }
  if (ds.width() != model_cfg.input_dim) throw Error("feature width does not match features.bins");

  TrainingData all{feature_matrix(ds, {}), ds.labels, std::nullopt};
  if (mode == ModelKind::Fusion) {
    const EmbeddingTable table = load_embeddings(cfg.embeddings_path, model_cfg.embedding_dim);
    all.embeddings = embedding_matrix(table, ds.sample_ids);
  }
  const Split split = split_dataset(ds.size(), cfg.split);
  for (const auto& [name, idx] : {std::pair{"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}}) {
    std::vector<std::size_t> counts(ds.class_names.size(), 0);
    for (const auto i : *idx) ++counts[ds.labels[i]];
    log << name << ':';
    for (std::size_t c = 0; c < counts.size(); ++c) log << ' ' << ds.class_names[c] << '=' << counts[c];
    log << '\n';
  }

  const TrainResult result = train(model_cfg, all.subset(split.train), all.subset(split.validation), cfg.train);

  const std::string tag = to_string(mode);
  const fs::path history = paths.out / ("history_" + tag + ".csv");
  {
    std::ofstream out(history, std::ios::binary);
    if (!out) throw Error("cannot write " + history.string());
    out << "epoch,train_loss,val_accuracy\n";
    for (const auto& r : result.history) {
      out << r.epoch << ',' << csv::format_double(r.train_loss) << ',' << csv::format_double(r.val_accuracy) << '\n';
    }
    if (!out.flush()) throw Error("cannot write " + history.string());
  }
  write_json({{"artifact", "history"}, {"mode", tag}, {"best_epoch", result.best_epoch}, {"run_config", cfg.to_json()}},
             meta_path(history));

  const fs::path ckpt = paths.checkpoint.empty() ? paths.out / ("checkpoint_" + tag + ".bin") : paths.checkpoint;
  save_checkpoint(Checkpoint{result.model, result.optimizer, result.best_epoch, ds.class_names, cfg.to_json()}, ckpt);
  log << "best validation accuracy at epoch " << result.best_epoch << "; wrote " << ckpt.string() << '\n';
}

void cmd_eval(const RunConfig& cfg, const CommandPaths& paths, std::ostream& log) {
  ensure_dir(paths.out);
  const fs::path ckpt_path = paths.checkpoint.empty() ? paths.out / "checkpoint_tda.bin" : paths.checkpoint;
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const FeatureDataset ds = load_feature_dataset(features_path(paths));
  const ClassifierConfig& mc = ckpt.model.config();
  if (mc.num_classes != ds.class_names.size() || ckpt.class_names.size() != ds.class_names.size()) {
    throw Error("checkpoint was trained for " + std::to_string(mc.num_classes) + " classes but the data has " +
                std::to_string(ds.class_names.size()));
  }
  if (mc.input_dim != ds.width()) {
    throw Error("checkpoint expects " + std::to_string(mc.input_dim) + " features, data has " + std::to_string(ds.width()));
  }

  const Split split = split_dataset(ds.size(), cfg.split);
  const Matrix features = feature_matrix(ds, split.test);
  std::vector<std::size_t> truth;
  std::vector<std::string> ids;
  for (const auto i : split.test) {
    truth.push_back(ds.labels[i]);
    ids.push_back(ds.sample_ids[i]);
  }
  std::optional<Matrix> emb;
  if (ckpt.model.uses_embeddings()) {
    if (cfg.embeddings_path.empty()) throw Error("fusion checkpoint requires --embeddings");
    emb = embedding_matrix(load_embeddings(cfg.embeddings_path, mc.embedding_dim), ids);
  }
  const Matrix probs = predict(ckpt.model, features, emb ? &*emb : nullptr);
  const MetricsReport rep = evaluate(truth, probs);

  const std::string tag = to_string(mc.kind);
  json auc = json::array();
  json skipped = json::array();
  json curves = json::array();
  for (std::size_t c = 0; c < rep.roc.auc_per_class.size(); ++c) {
    auc.push_back(nullable(rep.roc.auc_per_class[c]));
    if (!rep.roc.defined[c]) skipped.push_back(ds.class_names[c]);
    json pts = json::array();
    for (const auto& p : rep.roc.curves[c]) pts.push_back({p.fpr, p.tpr});
    curves.push_back(std::move(pts));

    const fs::path roc_path = paths.out / ("roc_" + tag + "_class" + std::to_string(c) + ".csv");
    std::ofstream out(roc_path, std::ios::binary);
    if (!out) throw Error("cannot write " + roc_path.string());
    out << "fpr,tpr,threshold\n";
    for (const auto& p : rep.roc.curves[c]) {
      out << csv::format_double(p.fpr) << ',' << csv::format_double(p.tpr) << ',' << threshold_text(p.threshold) << '\n';
    }
    if (!out.flush()) throw Error("cannot write " + roc_path.string());
    write_json({{"artifact", "roc"}, {"mode", tag}, {"class", ds.class_names[c]}, {"run_config", cfg.to_json()}},
               meta_path(roc_path));
  }
  write_json({{"artifact", "metrics"},
              {"mode", tag},
              {"checkpoint_epoch", ckpt.epoch},
              {"class_names", ds.class_names},
              {"samples", rep.samples},
              {"accuracy", rep.accuracy},
              {"macro_precision", rep.macro_precision},
              {"macro_recall", rep.macro_recall},
              {"macro_f1", rep.macro_f1},
              {"per_class_precision", rep.prf.per_class_precision},
              {"per_class_recall", rep.prf.per_class_recall},
              {"per_class_f1", rep.prf.per_class_f1},
              {"auc_per_class", auc},
              {"macro_auc", nullable(rep.roc.macro_auc)},
              {"auc_skipped_classes", skipped},
              {"confusion", rep.confusion},
              {"roc_points", curves},
              {"conventions",
               {{"averaging", "macro (unweighted mean over classes)"},
                {"zero_denominator", "precision/recall/F1 of that class count as 0"},
                {"auc_undefined", "classes without positives or negatives are skipped in macro AUC"},
                {"argmax_ties", "lowest class index"}}},
              {"run_config", cfg.to_json()}},
             paths.out / ("metrics_" + tag + ".json"));

  const fs::path conf_path = paths.out / ("confusion_" + tag + ".csv");
  std::ofstream out(conf_path, std::ios::binary);
  if (!out) throw Error("cannot write " + conf_path.string());
  out << "true\\predicted";
  for (const auto& n : ds.class_names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < rep.confusion.size(); ++r) {
    out << ds.class_names[r];
    for (const auto v : rep.confusion[r]) out << ',' << v;
    out << '\n';
  }
  if (!out.flush()) throw Error("cannot write " + conf_path.string());
  write_json({{"artifact", "confusion"}, {"mode", tag}, {"rows", "true class"}, {"run_config", cfg.to_json()}},
             meta_path(conf_path));
  log << "test accuracy " << rep.accuracy << ", macro AUC " << rep.roc.macro_auc << '\n';
}

void cmd_analyze(const RunConfig& cfg, const CommandPaths& paths, std::ostream& log) {
  ensure_dir(paths.out);
  const FeatureDataset ds = load_feature_dataset(features_path(paths));
  const std::size_t n = ds.bin_spec.count;

  struct Block {
    const char* name;
    std::size_t begin, end;
  };
  for (const Block& b : {Block{"pca_b0", 0, n}, Block{"pca_b1", n, 2 * n}, Block{"pca_full", 0, 2 * n}}) {
    std::vector<std::vector<double>> rows;
    for (const auto& f : ds.features) rows.emplace_back(f.begin() + static_cast<std::ptrdiff_t>(b.begin),
                                                        f.begin() + static_cast<std::ptrdiff_t>(b.end));
    const PcaResult pca = pca_project(rows, 3);
    const fs::path path = paths.out / (std::string(b.name) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "sample_id,label,pc1,pc2,pc3\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
      out << ds.sample_ids[i] << ',' << ds.labels[i];
      for (const double v : pca.coordinates[i]) out << ',' << csv::format_double(v);
      out << '\n';
    }
    if (!out.flush()) throw Error("cannot write " + path.string());
    write_json({{"artifact", b.name},
                {"columns", {b.begin, b.end}},
                {"eigenvalues", pca.eigenvalues},
                {"axes", pca.axes},
                {"class_names", ds.class_names},
                {"run_config", cfg.to_json()}},
               meta_path(path));
  }
  const fs::path dist = paths.out / "distribution.csv";
  write_distribution_csv(class_distribution_export(ds), dist);
  write_json({{"artifact", "distribution"}, {"aggregate", "per-sample mean over bins"}, {"run_config", cfg.to_json()}},
             meta_path(dist));
  log << "wrote PCA and distribution exports to " << paths.out.string() << '\n';
}

void cmd_synth(const RunConfig& cfg, const CommandPaths& paths, std::ostream& log) {
  ensure_dir(paths.out);
  const EmbeddingTable table = write_synth_dataset(cfg.synth, cfg.num_classes, cfg.embedding_dim, paths.out);
  save_embeddings(table, paths.out / "embeddings.csv");
  write_json({{"artifact", "synth"}, {"class_names", synth_class_names(cfg.num_classes)}, {"run_config", cfg.to_json()}},
             paths.out / "synth.meta.json");
  log << "wrote " << cfg.num_classes << " classes x " << cfg.synth.per_class << " images to " << paths.out.string()
      << '\n';
}

}  // namespace topofuse
