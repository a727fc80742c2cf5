#include "topofuse/neural.hpp"

#include <algorithm>
#include <cmath>

#include "topofuse/error.hpp"

namespace topofuse {

bool DenseLayer::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(weights.data().begin(), weights.data().end(), finite) &&
         std::all_of(biases.begin(), biases.end(), finite);
}

void glorot_init(DenseLayer& layer, CounterRng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(layer.in() + layer.out()));
  for (double& w : layer.weights.data()) w = rng.uniform(-limit, limit);
  std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x) {
  if (x.cols() != layer.in()) {
    throw Error("dense layer expects width " + std::to_string(layer.in()) + ", got " + std::to_string(x.cols()));
  }
  Matrix y(x.rows(), layer.out());
  for (std::size_t b = 0; b < x.rows(); ++b) {
    const auto xr = x.row(b);
    for (std::size_t o = 0; o < layer.out(); ++o) {
      const auto wr = layer.weights.row(o);
      double acc = layer.biases[o];
      for (std::size_t i = 0; i < xr.size(); ++i) acc += wr[i] * xr[i];
      y(b, o) = acc;
    }
  }
  return y;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_grad_mask(const Matrix& x) {
  Matrix m(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.data().size(); ++i) m.data()[i] = x.data()[i] > 0.0 ? 1.0 : 0.0;
  return m;
}

DropoutResult dropout(const Matrix& x, double p, Mode mode, CounterRng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw Error("dropout probability must lie in [0, 1)");
  DropoutResult r{x, Matrix(x.rows(), x.cols(), 1.0)};
  if (mode == Mode::Eval || p == 0.0) return r;
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const bool keep = !rng.bernoulli(p);
    r.mask.data()[i] = keep ? 1.0 : 0.0;
    r.output.data()[i] = keep ? x.data()[i] * scale : 0.0;
  }
  return r;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

Matrix softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t b = 0; b < logits.rows(); ++b) {
    const auto row = softmax(logits.row(b));
    std::copy(row.begin(), row.end(), p.row(b).begin());
  }
  return p;
}

namespace {

void check_labels(const Matrix& probs, std::span<const std::size_t> labels) {
  if (labels.size() != probs.rows()) throw Error("label count does not match batch size");
  for (const auto l : labels)
    if (l >= probs.cols()) throw Error("label " + std::to_string(l) + " out of range");
}

}  // namespace

double cross_entropy(const Matrix& probs, std::span<const std::size_t> labels) {
  check_labels(probs, labels);
  double total = 0.0;
  for (std::size_t b = 0; b < probs.rows(); ++b) total -= std::log(std::max(probs(b, labels[b]), kProbabilityFloor));
  return total / static_cast<double>(probs.rows());
}

Matrix softmax_cross_entropy_grad(const Matrix& probs, std::span<const std::size_t> labels) {
  check_labels(probs, labels);
  Matrix g = probs;
  const double inv = 1.0 / static_cast<double>(probs.rows());
  for (std::size_t b = 0; b < probs.rows(); ++b) {
    g(b, labels[b]) -= 1.0;
    for (double& v : g.row(b)) v *= inv;
  }
  return g;
}

Mlp::Mlp(std::vector<LayerSpec> specs) : specs_(std::move(specs)) {
  if (specs_.empty()) throw Error("network needs at least one layer");
  for (std::size_t k = 0; k < specs_.size(); ++k) {
    const LayerSpec& s = specs_[k];
    if (s.in == 0 || s.out == 0) throw Error("layer widths must be positive");
    if (k > 0 && specs_[k - 1].out != s.in) {
      throw Error("layer " + std::to_string(k) + " expects width " + std::to_string(s.in) + " but previous layer emits " +
                  std::to_string(specs_[k - 1].out));
    }
    if (!(s.dropout >= 0.0 && s.dropout < 1.0)) throw Error("dropout probability must lie in [0, 1)");
    layers_.emplace_back(s.in, s.out);
  }
}

void Mlp::initialize(CounterRng& rng) {
  for (auto& layer : mutable_layers()) glorot_init(layer, rng);
}

bool Mlp::specs_eq(const Mlp& o) const {
  if (specs_.size() != o.specs_.size()) return false;
  for (std::size_t k = 0; k < specs_.size(); ++k) {
    const auto& a = specs_[k];
    const auto& b = o.specs_[k];
    if (a.in != b.in || a.out != b.out || a.activation != b.activation || a.dropout != b.dropout) return false;
  }
  return true;
}

Matrix Mlp::forward(const Matrix& x, Mode mode, CounterRng* rng, ForwardTape* tape) const {
  if (tape) {
    *tape = ForwardTape{};
    tape->network = this;
    tape->network_version = version_;
    tape->training = mode == Mode::Train;
  }
  Matrix h = x;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    Matrix z = dense_forward(layers_[k], h);
    Matrix a = specs_[k].activation == Activation::Relu ? relu(z) : z;
    Matrix mask;
    if (mode == Mode::Train && specs_[k].dropout > 0.0) {
      if (!rng) throw Error("training-mode dropout needs a random generator");
      DropoutResult d = dropout(a, specs_[k].dropout, mode, *rng);
      a = std::move(d.output);
      mask = std::move(d.mask);
    }
    if (tape) {
      tape->inputs.push_back(std::move(h));
      tape->pre_activations.push_back(std::move(z));
      tape->dropout_masks.push_back(std::move(mask));
    }
    h = std::move(a);
  }
  return h;
}

Mlp::Gradients Mlp::backward(const ForwardTape& tape, const Matrix& grad_output) const {
  if (tape.network != this || tape.network_version != version_ || tape.depth() != layers_.size()) {
    throw Error("forward tape is stale or belongs to another network");
  }
  const std::size_t batch = tape.inputs.front().rows();
  if (grad_output.rows() != batch || grad_output.cols() != output_width()) {
    throw Error("output gradient shape does not match the recorded batch");
  }
  Gradients g;
  g.layers.resize(layers_.size());
  Matrix delta = grad_output;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const LayerSpec& spec = specs_[k];
    const DenseLayer& layer = layers_[k];
    const Matrix& mask = tape.dropout_masks[k];
    if (mask.rows() != 0) {
      const double scale = 1.0 / (1.0 - spec.dropout);
      for (std::size_t i = 0; i < delta.data().size(); ++i) delta.data()[i] *= mask.data()[i] * scale;
    }
    if (spec.activation == Activation::Relu) {
      const Matrix& z = tape.pre_activations[k];
      for (std::size_t i = 0; i < delta.data().size(); ++i)
        if (!(z.data()[i] > 0.0)) delta.data()[i] = 0.0;
    }
    const Matrix& x = tape.inputs[k];
    DenseLayer grad(layer.in(), layer.out());
    Matrix dx(batch, layer.in());
    for (std::size_t b = 0; b < batch; ++b) {
      const auto xr = x.row(b);
      auto dxr = dx.row(b);
      for (std::size_t o = 0; o < layer.out(); ++o) {
        const double d = delta(b, o);
        if (d == 0.0) continue;
        grad.biases[o] += d;
        auto gw = grad.weights.row(o);
        const auto wr = layer.weights.row(o);
        for (std::size_t i = 0; i < xr.size(); ++i) {
          gw[i] += d * xr[i];
          dxr[i] += d * wr[i];
        }
      }
    }
    g.layers[k] = std::move(grad);
    delta = std::move(dx);
  }
  g.input = std::move(delta);
  return g;
}

std::vector<std::span<double>> parameter_spans(std::vector<DenseLayer>& layers) {
  std::vector<std::span<double>> out;
  for (auto& l : layers) {
    out.emplace_back(l.weights.data());
    out.emplace_back(l.biases);
  }
  return out;
}

std::vector<std::span<const double>> parameter_spans(const std::vector<DenseLayer>& layers) {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers) {
    out.emplace_back(l.weights.data());
    out.emplace_back(l.biases);
  }
  return out;
}

AdamState AdamState::for_shapes(const std::vector<std::size_t>& sizes, AdamConfig config) {
  AdamState s;
  s.config = config;
  for (const auto n : sizes) {
    s.first_moment.emplace_back(n, 0.0);
    s.second_moment.emplace_back(n, 0.0);
  }
  return s;
}

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw Error("Adam: parameter, gradient and state arrays disagree in count");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].size() != grads[k].size() || params[k].size() != state.first_moment[k].size()) {
      throw Error("Adam: shape mismatch in parameter array " + std::to_string(k));
    }
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    for (std::size_t i = 0; i < params[k].size(); ++i) {
      const double g = grads[k][i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double m_hat = m[i] / correct1;
      const double v_hat = v[i] / correct2;
      params[k][i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace topofuse
