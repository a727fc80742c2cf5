// Data splitting, the topological MLP and fusion classifiers, embedding
// ingestion and the training loop.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topofuse/betti_features.hpp"
#include "topofuse/neural.hpp"

namespace topofuse {

struct SplitConfig {
  double test_fraction = 0.10;
  double validation_fraction = 0.10;  // of the non-test remainder
  std::uint64_t seed = 3;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1; the last ceil(test_fraction * n) indices are the
/// test set and the last ceil(validation_fraction * rest) of the remainder
/// the validation set. Throws when any part would be empty.
Split split_dataset(std::size_t n, const SplitConfig& cfg);

inline constexpr std::size_t kEmbeddingDim = 64;

/// External image embeddings keyed by sample id.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = kEmbeddingDim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  void insert(const std::string& id, std::vector<double> values);
  const std::vector<double>* find(const std::string& id) const;
  const std::map<std::string, std::vector<double>>& rows() const { return rows_; }

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<double>> rows_;
};

/// CSV with header `sample_id,e00,...,e63`.
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t dim = kEmbeddingDim);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

enum class ModelKind { Tda, Fusion };

const char* to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& s);

struct ClassifierConfig {
  ModelKind kind = ModelKind::Tda;
  std::size_t input_dim = 200;
  std::vector<std::size_t> trunk_widths{800, 256, 128};
  std::size_t embedding_dim = kEmbeddingDim;
  std::vector<std::size_t> fusion_widths{256, 128};
  std::size_t num_classes = 4;
  double dropout = 0.2;

  bool operator==(const ClassifierConfig&) const = default;
};

/// Topological trunk (ReLU after every layer) followed by a softmax head.
/// The TDA head is a single linear layer on the trunk output; the fusion head
/// reads [trunk output, embedding] through the fusion widths, with dropout
/// after the last of them.
class Classifier {
 public:
  explicit Classifier(ClassifierConfig cfg);
  /// Adopts existing networks; throws when the head width differs from
  /// trunk output (+ embedding width for fusion).
  Classifier(ClassifierConfig cfg, Mlp trunk, Mlp head);

  void initialize(CounterRng& rng);

  const ClassifierConfig& config() const { return cfg_; }
  const Mlp& trunk() const { return trunk_; }
  const Mlp& head() const { return head_; }
  Mlp& mutable_trunk() { return trunk_; }
  Mlp& mutable_head() { return head_; }
  bool uses_embeddings() const { return cfg_.kind == ModelKind::Fusion; }

  struct Tape {
    ForwardTape trunk;
    ForwardTape head;
  };

  /// Pre-softmax scores. `embeddings` must be given exactly for fusion models.
  Matrix logits(const Matrix& features, const Matrix* embeddings, Mode mode, CounterRng* rng, Tape* tape) const;

  struct LossAndGradients {
    double loss;
    std::vector<DenseLayer> trunk;
    std::vector<DenseLayer> head;
  };

  LossAndGradients loss_and_gradients(const Matrix& features, const Matrix* embeddings,
                                      std::span<const std::size_t> labels, CounterRng& rng) const;

  /// Trunk weights, trunk biases, ..., head weights, head biases.
  std::vector<std::span<double>> parameters();
  std::vector<std::size_t> parameter_sizes() const;

  bool operator==(const Classifier& o) const {
    return cfg_ == o.cfg_ && trunk_ == o.trunk_ && head_ == o.head_;
  }

 private:
  void check_widths() const;

  ClassifierConfig cfg_;
  Mlp trunk_;
  Mlp head_;
};

/// Row-wise class probabilities in evaluation mode (dropout off).
Matrix predict(const Classifier& model, const Matrix& features, const Matrix* embeddings);

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 50;
  std::uint64_t seed = 3;
  AdamConfig adam{};
};

struct EpochRecord {
  std::size_t epoch;  // 1-based
  double train_loss;
  double val_accuracy;
};

struct TrainingData {
  Matrix features;
  std::vector<std::size_t> labels;
  std::optional<Matrix> embeddings;

  std::size_t size() const { return labels.size(); }
  TrainingData subset(std::span<const std::size_t> rows) const;
};

struct TrainResult {
  Classifier model;  // parameters from the best validation epoch
  AdamState optimizer;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  std::vector<EpochRecord> history;
};

/// 1-based epoch with the highest accuracy, earliest on ties; 0 if empty.
std::size_t select_best_epoch(std::span<const double> val_accuracy);

/// Seeded Glorot initialisation followed by mini-batch Adam; the model from
/// the epoch with best validation accuracy is returned. Throws on a
/// non-finite loss.
TrainResult train(const ClassifierConfig& cfg, const TrainingData& train_set, const TrainingData& validation,
                  const TrainConfig& tc);

/// Converts Betti counts to a double matrix (rows in `rows` order, or all).
Matrix feature_matrix(const FeatureDataset& ds, std::span<const std::size_t> rows);

/// Embedding rows aligned with `ids`; throws naming the first missing id.
Matrix embedding_matrix(const EmbeddingTable& table, std::span<const std::string> ids);

double accuracy(const Matrix& probs, std::span<const std::size_t> labels);

}  // namespace topofuse
