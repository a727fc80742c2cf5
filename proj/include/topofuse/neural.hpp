// Feed-forward networks in 64-bit floating point: dense layers, ReLU,
// inverted dropout, softmax cross-entropy, reverse-mode gradients and Adam.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topofuse/rng.hpp"

namespace topofuse {

/// Row-major dense matrix; rows are batch items.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = W x + b with W stored out x in.
struct DenseLayer {
  Matrix weights;
  std::vector<double> biases;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out) : weights(out, in), biases(out, 0.0) {}
  std::size_t in() const { return weights.cols(); }
  std::size_t out() const { return weights.rows(); }
  bool all_finite() const;
  bool operator==(const DenseLayer&) const = default;
};

/// Glorot-uniform weights in +-sqrt(6 / (in + out)); zero biases.
void glorot_init(DenseLayer& layer, CounterRng& rng);

Matrix dense_forward(const DenseLayer& layer, const Matrix& x);

Matrix relu(const Matrix& x);

/// 1 where x > 0, else 0.
Matrix relu_grad_mask(const Matrix& x);

enum class Mode { Train, Eval };

struct DropoutResult {
  Matrix output;
  Matrix mask;  // keep indicator (0 or 1); all ones in eval mode
};

/// Inverted dropout: survivors are scaled by 1 / (1 - p). Requires 0 <= p < 1.
DropoutResult dropout(const Matrix& x, double p, Mode mode, CounterRng& rng);

/// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);
std::vector<double> softmax(std::span<const double> logits);

inline constexpr double kProbabilityFloor = 1e-12;

/// Mean over rows of -log(max(p[label], 1e-12)).
double cross_entropy(const Matrix& probs, std::span<const std::size_t> labels);

/// d(mean loss)/d(logits) = (softmax - one_hot) / batch.
Matrix softmax_cross_entropy_grad(const Matrix& probs, std::span<const std::size_t> labels);

enum class Activation { Identity, Relu };

struct LayerSpec {
  std::size_t in;
  std::size_t out;
  Activation activation;
  double dropout = 0.0;  // applied after the activation
};

/// Values recorded by a forward pass for the matching backward pass.
struct ForwardTape {
  std::vector<Matrix> inputs;           // input to each layer
  std::vector<Matrix> pre_activations;  // W x + b per layer
  std::vector<Matrix> dropout_masks;    // per layer; empty matrix when unused
  std::size_t network_version = 0;
  const void* network = nullptr;
  bool training = false;

  std::size_t depth() const { return inputs.size(); }
};

/// Sequential stack of dense layers with per-layer activation and dropout.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<LayerSpec> specs);

  void initialize(CounterRng& rng);

  /// `rng` is consulted only in training mode when a layer has dropout > 0.
  Matrix forward(const Matrix& x, Mode mode, CounterRng* rng, ForwardTape* tape) const;

  struct Gradients {
    std::vector<DenseLayer> layers;
    Matrix input;  // d loss / d input
  };

  /// Exact gradients given d loss / d output; throws on a stale or foreign tape.
  Gradients backward(const ForwardTape& tape, const Matrix& grad_output) const;

  std::size_t depth() const { return layers_.size(); }
  std::size_t input_width() const { return specs_.front().in; }
  std::size_t output_width() const { return specs_.back().out; }
  const std::vector<LayerSpec>& specs() const { return specs_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Mutable parameter access; invalidates outstanding tapes.
  std::vector<DenseLayer>& mutable_layers() {
    ++version_;
    return layers_;
  }
  std::size_t version() const { return version_; }

  bool operator==(const Mlp& o) const { return specs_eq(o) && layers_ == o.layers_; }

 private:
  bool specs_eq(const Mlp& o) const;

  std::vector<LayerSpec> specs_;
  std::vector<DenseLayer> layers_;
  std::size_t version_ = 0;
};

/// Every weight and bias array of `layers`, in layer order, weights first.
std::vector<std::span<double>> parameter_spans(std::vector<DenseLayer>& layers);
std::vector<std::span<const double>> parameter_spans(const std::vector<DenseLayer>& layers);

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  /// Zeroed accumulators, one per parameter array of the given size.
  static AdamState for_shapes(const std::vector<std::size_t>& sizes, AdamConfig config = {});
  bool operator==(const AdamState&) const = default;
};

/// Bias-corrected Adam update applied in place.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state);

}  // namespace topofuse
