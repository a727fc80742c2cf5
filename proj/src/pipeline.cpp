#include "topofuse/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "topofuse/csv.hpp"
#include "topofuse/error.hpp"
#include "topofuse/metrics.hpp"

namespace topofuse {

namespace {

std::size_t ceil_fraction(double fraction, std::size_t n) {
  // Guard against 0.1 * 90 landing a hair above 9.
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

// Stream labels for CounterRng::split.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kDropoutStream = 3;

}  // namespace

Split split_dataset(std::size_t n, const SplitConfig& cfg) {
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) ||
      !(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
    throw Error("split fractions must lie in (0, 1)");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(cfg.seed);
  rng.shuffle(std::span<std::size_t>(order));

  const std::size_t n_test = ceil_fraction(cfg.test_fraction, n);
  const std::size_t rest = n - std::min(n, n_test);
  const std::size_t n_val = ceil_fraction(cfg.validation_fraction, rest);
  if (n_test == 0 || n_test >= n || n_val == 0 || n_val >= rest) {
    throw Error("dataset of " + std::to_string(n) + " samples is too small for a train/validation/test split");
  }
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rest - n_val));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(rest - n_val),
                      order.begin() + static_cast<std::ptrdiff_t>(rest));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(rest), order.end());
  return s;
}

void EmbeddingTable::insert(const std::string& id, std::vector<double> values) {
  if (values.size() != dim_) {
    throw Error("embedding for " + id + " has width " + std::to_string(values.size()) + ", expected " +
                std::to_string(dim_));
  }
  for (const double v : values)
    if (!std::isfinite(v)) throw Error("non-finite embedding value for " + id);
  if (!rows_.emplace(id, std::move(values)).second) throw Error("duplicate embedding id: " + id);
}

const std::vector<double>* EmbeddingTable::find(const std::string& id) const {
  const auto it = rows_.find(id);
  return it == rows_.end() ? nullptr : &it->second;
}

namespace {

std::string embedding_column(std::size_t k) {
  std::ostringstream s;
  s << 'e' << (k < 10 ? "0" : "") << k;
  return s.str();
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t dim) {
  const csv::Table table = csv::read(path);
  if (table.header.empty() || table.header[0] != "sample_id") {
    throw Error(path.string() + ": first column must be sample_id");
  }
  const std::size_t width = table.header.size() - 1;
  if (width != dim) {
    throw Error(path.string() + ": embedding width " + std::to_string(width) + " does not match expected " +
                std::to_string(dim));
  }
  for (std::size_t k = 0; k < dim; ++k) {
    if (table.header[k + 1] != embedding_column(k)) throw Error(path.string() + ": unexpected column " + table.header[k + 1]);
  }
  EmbeddingTable out(dim);
  for (const auto& row : table.rows) {
    std::vector<double> v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = csv::parse_double(row[k + 1], path.string() + " id " + row[0]);
    out.insert(row[0], std::move(v));
  }
  return out;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "sample_id";
  for (std::size_t k = 0; k < table.dim(); ++k) out << ',' << embedding_column(k);
  out << '\n';
  for (const auto& [id, values] : table.rows()) {
    csv::require_plain_field(id);
    out << id;
    for (const double v : values) out << ',' << csv::format_double(v);
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

const char* to_string(ModelKind kind) { return kind == ModelKind::Tda ? "tda" : "fusion"; }

ModelKind parse_model_kind(const std::string& s) {
  if (s == "tda") return ModelKind::Tda;
  if (s == "fusion") return ModelKind::Fusion;
  throw Error("unknown model mode '" + s + "' (expected tda or fusion)");
}

namespace {

Mlp make_trunk(const ClassifierConfig& cfg) {
  if (cfg.trunk_widths.empty()) throw Error("trunk needs at least one layer");
  std::vector<LayerSpec> specs;
  std::size_t in = cfg.input_dim;
  for (const auto w : cfg.trunk_widths) {
    specs.push_back({in, w, Activation::Relu, 0.0});
    in = w;
  }
  return Mlp(std::move(specs));
}

Mlp make_head(const ClassifierConfig& cfg) {
  const std::size_t trunk_out = cfg.trunk_widths.back();
  std::vector<LayerSpec> specs;
  if (cfg.kind == ModelKind::Tda) {
    specs.push_back({trunk_out, cfg.num_classes, Activation::Identity, 0.0});
    return Mlp(std::move(specs));
  }
  if (cfg.fusion_widths.empty()) throw Error("fusion head needs at least one hidden layer");
  std::size_t in = trunk_out + cfg.embedding_dim;
  for (std::size_t k = 0; k < cfg.fusion_widths.size(); ++k) {
    const bool last = k + 1 == cfg.fusion_widths.size();
    specs.push_back({in, cfg.fusion_widths[k], Activation::Relu, last ? cfg.dropout : 0.0});
    in = cfg.fusion_widths[k];
  }
  specs.push_back({in, cfg.num_classes, Activation::Identity, 0.0});
  return Mlp(std::move(specs));
}

}  // namespace

Classifier::Classifier(ClassifierConfig cfg) : cfg_(std::move(cfg)), trunk_(make_trunk(cfg_)), head_(make_head(cfg_)) {
  check_widths();
}

Classifier::Classifier(ClassifierConfig cfg, Mlp trunk, Mlp head)
    : cfg_(std::move(cfg)), trunk_(std::move(trunk)), head_(std::move(head)) {
  check_widths();
}

void Classifier::check_widths() const {
  if (cfg_.num_classes < 2) throw Error("classifier needs at least two classes");
  if (trunk_.input_width() != cfg_.input_dim) {
    throw Error("trunk input width " + std::to_string(trunk_.input_width()) + " != configured " +
                std::to_string(cfg_.input_dim));
  }
  const std::size_t expected = trunk_.output_width() + (uses_embeddings() ? cfg_.embedding_dim : 0);
  if (head_.input_width() != expected) {
    throw Error("head input width " + std::to_string(head_.input_width()) + " does not match concatenation width " +
                std::to_string(expected));
  }
  if (head_.output_width() != cfg_.num_classes) throw Error("head output width does not match class count");
}

void Classifier::initialize(CounterRng& rng) {
  trunk_.initialize(rng);
  head_.initialize(rng);
}

Matrix Classifier::logits(const Matrix& features, const Matrix* embeddings, Mode mode, CounterRng* rng,
                          Tape* tape) const {
  const Matrix trunk_out = trunk_.forward(features, mode, rng, tape ? &tape->trunk : nullptr);
  if (!uses_embeddings()) {
    if (embeddings) throw Error("TDA classifier does not take embeddings");
    return head_.forward(trunk_out, mode, rng, tape ? &tape->head : nullptr);
  }
  if (!embeddings) throw Error("fusion classifier requires embeddings");
  if (embeddings->cols() != cfg_.embedding_dim || embeddings->rows() != features.rows()) {
    throw Error("embedding matrix is " + std::to_string(embeddings->rows()) + "x" + std::to_string(embeddings->cols()) +
                ", expected " + std::to_string(features.rows()) + "x" + std::to_string(cfg_.embedding_dim));
  }
  const std::size_t t = trunk_out.cols();
  Matrix fused(features.rows(), t + cfg_.embedding_dim);
  for (std::size_t b = 0; b < features.rows(); ++b) {
    auto dst = fused.row(b);
    std::copy(trunk_out.row(b).begin(), trunk_out.row(b).end(), dst.begin());
    std::copy(embeddings->row(b).begin(), embeddings->row(b).end(), dst.begin() + static_cast<std::ptrdiff_t>(t));
  }
  return head_.forward(fused, mode, rng, tape ? &tape->head : nullptr);
}

Classifier::LossAndGradients Classifier::loss_and_gradients(const Matrix& features, const Matrix* embeddings,
                                                            std::span<const std::size_t> labels,
                                                            CounterRng& rng) const {
  Tape tape;
  const Matrix probs = softmax(logits(features, embeddings, Mode::Train, &rng, &tape));
  LossAndGradients out;
  out.loss = cross_entropy(probs, labels);
  Mlp::Gradients head_grads = head_.backward(tape.head, softmax_cross_entropy_grad(probs, labels));
  Matrix trunk_delta = std::move(head_grads.input);
  if (uses_embeddings()) {
    // Only the trunk block of the fused input feeds back into the trunk.
    const std::size_t t = trunk_.output_width();
    Matrix sliced(trunk_delta.rows(), t);
    for (std::size_t b = 0; b < sliced.rows(); ++b)
      std::copy_n(trunk_delta.row(b).begin(), t, sliced.row(b).begin());
    trunk_delta = std::move(sliced);
  }
  out.trunk = trunk_.backward(tape.trunk, trunk_delta).layers;
  out.head = std::move(head_grads.layers);
  return out;
}

std::vector<std::span<double>> Classifier::parameters() {
  auto p = parameter_spans(trunk_.mutable_layers());
  auto h = parameter_spans(head_.mutable_layers());
  p.insert(p.end(), h.begin(), h.end());
  return p;
}

std::vector<std::size_t> Classifier::parameter_sizes() const {
  std::vector<std::size_t> sizes;
  for (const Mlp* net : {&trunk_, &head_})
    for (const auto s : parameter_spans(net->layers())) sizes.push_back(s.size());
  return sizes;
}

Matrix predict(const Classifier& model, const Matrix& features, const Matrix* embeddings) {
  return softmax(model.logits(features, embeddings, Mode::Eval, nullptr, nullptr));
}

TrainingData TrainingData::subset(std::span<const std::size_t> rows) const {
  TrainingData out;
  out.features = Matrix(rows.size(), features.cols());
  if (embeddings) out.embeddings = Matrix(rows.size(), embeddings->cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    std::copy(features.row(r).begin(), features.row(r).end(), out.features.row(i).begin());
    if (embeddings) std::copy(embeddings->row(r).begin(), embeddings->row(r).end(), out.embeddings->row(i).begin());
    out.labels.push_back(labels[r]);
  }
  return out;
}

std::size_t select_best_epoch(std::span<const double> val_accuracy) {
  std::size_t best = 0;
  for (std::size_t e = 0; e < val_accuracy.size(); ++e)
    if (best == 0 || val_accuracy[e] > val_accuracy[best - 1]) best = e + 1;
  return best;
}

double accuracy(const Matrix& probs, std::span<const std::size_t> labels) {
  if (labels.size() != probs.rows()) throw Error("label count does not match prediction rows");
  if (labels.empty()) return 0.0;
  const auto pred = argmax_rows(probs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += pred[i] == labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

TrainResult train(const ClassifierConfig& cfg, const TrainingData& train_set, const TrainingData& validation,
                  const TrainConfig& tc) {
  if (tc.batch_size == 0) throw Error("batch size must be positive");
  if (train_set.size() == 0) throw Error("training set is empty");
  Classifier model(cfg);
  for (const TrainingData* d : {&train_set, &validation}) {
    if (d->features.cols() != cfg.input_dim && d->size() > 0) throw Error("feature width does not match model input");
    if (model.uses_embeddings() && !d->embeddings) throw Error("fusion training requires embeddings for every sample");
  }
  const CounterRng base(tc.seed);
  CounterRng init_rng = base.split(kInitStream);
  model.initialize(init_rng);

  TrainResult result{model, AdamState::for_shapes(model.parameter_sizes(), tc.adam), 0, {}};
  AdamState adam = result.optimizer;
  double best_acc = -1.0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    CounterRng shuffle_rng = base.split(kShuffleStream).split(epoch);
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    CounterRng dropout_rng = base.split(kDropoutStream).split(epoch);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t end = std::min(order.size(), start + tc.batch_size);
      const TrainingData batch = train_set.subset(std::span(order).subspan(start, end - start));
      const auto lg = model.loss_and_gradients(batch.features, model.uses_embeddings() ? &*batch.embeddings : nullptr,
                                               batch.labels, dropout_rng);
      if (!std::isfinite(lg.loss)) {
        throw Error("non-finite training loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                    std::to_string(start));
      }
      loss_sum += lg.loss * static_cast<double>(end - start);
      std::vector<std::span<const double>> grads = parameter_spans(lg.trunk);
      for (const auto s : parameter_spans(lg.head)) grads.push_back(s);
      const auto params = model.parameters();
      adam_step(params, grads, adam);
    }
    const Matrix val_probs =
        predict(model, validation.features, model.uses_embeddings() ? &*validation.embeddings : nullptr);
    const double val_acc = validation.size() == 0 ? 0.0 : accuracy(val_probs, validation.labels);
    result.history.push_back({epoch, loss_sum / static_cast<double>(order.size()), val_acc});
    if (val_acc > best_acc) {
      best_acc = val_acc;
      result.model = model;
      result.optimizer = adam;
      result.best_epoch = epoch;
    }
  }
  return result;
}

Matrix feature_matrix(const FeatureDataset& ds, std::span<const std::size_t> rows) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(ds.size());
    std::iota(all.begin(), all.end(), 0);
    rows = all;
  }
  Matrix m(rows.size(), ds.width());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& f = ds.features.at(rows[i]);
    for (std::size_t k = 0; k < f.size(); ++k) m(i, k) = static_cast<double>(f[k]);
  }
  return m;
}

Matrix embedding_matrix(const EmbeddingTable& table, std::span<const std::string> ids) {
  Matrix m(ids.size(), table.dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto* v = table.find(ids[i]);
    if (!v) throw Error("missing embedding for sample " + ids[i]);
    std::copy(v->begin(), v->end(), m.row(i).begin());
  }
  return m;
}

}  // namespace topofuse
