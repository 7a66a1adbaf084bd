#pragma once

// Dense multilayer perceptrons with explicit forward tapes and hand-written
// backpropagation. Samples are stored column-wise: an input batch is an
// (input_size x batch) matrix.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace vnflab::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kLeakySlope = 1e-2;

enum class Head { linear, scaled_tanh, softmax };

inline const char* head_name(Head head) {
  switch (head) {
    case Head::linear: return "linear";
    case Head::scaled_tanh: return "scaled_tanh";
    case Head::softmax: return "softmax";
  }
  return "?";
}

inline Head parse_head(const std::string& name) {
  if (name == "linear") return Head::linear;
  if (name == "scaled_tanh") return Head::scaled_tanh;
  if (name == "softmax") return Head::softmax;
  throw std::invalid_argument("unknown output head '" + name + "'");
}

/// One fully connected layer, y = W x + b. Also used as the container for
/// gradients and optimizer moments, which share the parameter shapes.
template <typename Scalar>
struct Dense {
  Matrix<Scalar> weight;  // out x in
  Vector<Scalar> bias;    // out
};

template <typename Scalar = double>
class Mlp {
 public:
  using scalar_type = Scalar;

  Mlp() = default;

  /// `dims` lists layer widths from input to output, e.g. {40, 128, 64, 2}.
  /// Parameters start at zero; see xavier_init.
  Mlp(const std::vector<Eigen::Index>& dims, Head head, Vector<Scalar> scale = {})
      : head_(head), scale_(std::move(scale)) {
    if (dims.size() < 2) throw std::invalid_argument("Mlp needs at least input and output widths");
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
      if (dims[i] <= 0 || dims[i + 1] <= 0) throw std::invalid_argument("Mlp layer widths must be positive");
      layers_.push_back({Matrix<Scalar>::Zero(dims[i + 1], dims[i]), Vector<Scalar>::Zero(dims[i + 1])});
    }
    if (head_ == Head::scaled_tanh) {
      if (scale_.size() != output_size()) throw std::invalid_argument("tanh head scale must match output width");
      if ((scale_.array() <= 0).any()) throw std::invalid_argument("tanh head scale must be positive");
    }
  }

  Eigen::Index input_size() const { return layers_.front().weight.cols(); }
  Eigen::Index output_size() const { return layers_.back().weight.rows(); }
  Head head() const { return head_; }
  const Vector<Scalar>& scale() const { return scale_; }

  std::vector<Dense<Scalar>>& layers() { return layers_; }
  const std::vector<Dense<Scalar>>& layers() const { return layers_; }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
  }

  bool same_shape(const Mlp& other) const {
    if (layers_.size() != other.layers_.size() || head_ != other.head_) return false;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (layers_[i].weight.rows() != other.layers_[i].weight.rows() ||
          layers_[i].weight.cols() != other.layers_[i].weight.cols())
        return false;
    }
    return true;
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    if (!a.same_shape(b) || a.scale_.size() != b.scale_.size() || a.scale_ != b.scale_) return false;
    for (std::size_t i = 0; i < a.layers_.size(); ++i) {
      if (a.layers_[i].weight != b.layers_[i].weight || a.layers_[i].bias != b.layers_[i].bias) return false;
    }
    return true;
  }

 private:
  std::vector<Dense<Scalar>> layers_;
  Head head_ = Head::linear;
  Vector<Scalar> scale_;
};

/// Per-layer values kept by a forward pass for the backward pass.
template <typename Scalar>
struct Tape {
  std::vector<Matrix<Scalar>> inputs;  // input to layer i
  std::vector<Matrix<Scalar>> pre;     // pre-activation of layer i
  Matrix<Scalar> output;
};

template <typename Scalar>
using Gradients = std::vector<Dense<Scalar>>;

namespace detail {

template <typename Scalar>
Matrix<Scalar> leaky(const Matrix<Scalar>& z) {
  const Scalar slope = static_cast<Scalar>(kLeakySlope);
  return z.unaryExpr([slope](Scalar x) { return x >= Scalar(0) ? x : slope * x; });
}

template <typename Scalar>
Matrix<Scalar> leaky_derivative(const Matrix<Scalar>& z) {
  const Scalar slope = static_cast<Scalar>(kLeakySlope);
  return z.unaryExpr([slope](Scalar x) { return x >= Scalar(0) ? Scalar(1) : slope; });
}

template <typename Scalar>
Matrix<Scalar> column_softmax(const Matrix<Scalar>& z) {
  Matrix<Scalar> y(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const Scalar top = z.col(c).maxCoeff();
    y.col(c) = (z.col(c).array() - top).exp().matrix();
    y.col(c) /= y.col(c).sum();
  }
  return y;
}

template <typename Scalar>
Matrix<Scalar> apply_head(const Mlp<Scalar>& net, const Matrix<Scalar>& z) {
  switch (net.head()) {
    case Head::linear: return z;
    case Head::scaled_tanh: return (z.array().tanh().colwise() * net.scale().array()).matrix();
    case Head::softmax: return column_softmax(z);
  }
  return z;
}

template <typename Scalar>
Matrix<Scalar> head_backward(const Mlp<Scalar>& net, const Matrix<Scalar>& z, const Matrix<Scalar>& y,
                             const Matrix<Scalar>& dy) {
  switch (net.head()) {
    case Head::linear: return dy;
    case Head::scaled_tanh: {
      auto t = z.array().tanh();
      return ((dy.array().colwise() * net.scale().array()) * (Scalar(1) - t.square())).matrix();
    }
    case Head::softmax: {
      // dz = y * (dy - <y, dy>) per column
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic> inner = (y.array() * dy.array()).colwise().sum();
      return (y.array() * (dy.rowwise() - inner).array()).matrix();
    }
  }
  return dy;
}

}  // namespace detail

/// Forward pass recording the tape needed by backward/input_grad.
template <typename Scalar, typename Derived>
const Matrix<Scalar>& forward(const Mlp<Scalar>& net, const Eigen::MatrixBase<Derived>& x, Tape<Scalar>& tape) {
  if (x.rows() != net.input_size()) throw std::invalid_argument("forward: input width mismatch");
  const auto& layers = net.layers();
  tape.inputs.resize(layers.size());
  tape.pre.resize(layers.size());
  Matrix<Scalar> a = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    tape.inputs[i] = std::move(a);
    tape.pre[i] = (layers[i].weight * tape.inputs[i]).colwise() + layers[i].bias;
    if (i + 1 < layers.size()) a = detail::leaky(tape.pre[i]);
  }
  tape.output = detail::apply_head(net, tape.pre.back());
  return tape.output;
}

template <typename Scalar, typename Derived>
Matrix<Scalar> forward(const Mlp<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() != net.input_size()) throw std::invalid_argument("forward: input width mismatch");
  const auto& layers = net.layers();
  Matrix<Scalar> a = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Matrix<Scalar> z = (layers[i].weight * a).colwise() + layers[i].bias;
    a = (i + 1 < layers.size()) ? detail::leaky(z) : detail::apply_head(net, z);
  }
  return a;
}

/// Result of backpropagating an output gradient through a recorded pass.
template <typename Scalar>
struct Backprop {
  Gradients<Scalar> params;
  Matrix<Scalar> input;  // d(loss)/d(input), same shape as the forward input
};

/// Backpropagates `output_grad` (d loss / d output, same shape as the output
/// batch). Parameter gradients are summed over the batch columns.
template <typename Scalar>
Backprop<Scalar> backprop(const Mlp<Scalar>& net, const Tape<Scalar>& tape, const Matrix<Scalar>& output_grad,
                          bool want_params = true) {
  const auto& layers = net.layers();
  if (tape.pre.size() != layers.size()) throw std::logic_error("backprop: tape does not match network");
  if (output_grad.rows() != tape.output.rows() || output_grad.cols() != tape.output.cols())
    throw std::invalid_argument("backprop: output gradient shape mismatch");
  Backprop<Scalar> out;
  if (want_params) out.params.resize(layers.size());
  Matrix<Scalar> dz = detail::head_backward(net, tape.pre.back(), tape.output, output_grad);
  for (std::size_t i = layers.size(); i-- > 0;) {
    if (want_params) {
      out.params[i].weight.noalias() = dz * tape.inputs[i].transpose();
      out.params[i].bias = dz.rowwise().sum();
    }
    Matrix<Scalar> da = layers[i].weight.transpose() * dz;
    if (i == 0) {
      out.input = std::move(da);
    } else {
      dz = da.cwiseProduct(detail::leaky_derivative(tape.pre[i - 1]));
    }
  }
  return out;
}

template <typename Scalar>
Gradients<Scalar> backward(const Mlp<Scalar>& net, const Tape<Scalar>& tape, const Matrix<Scalar>& output_grad) {
  return backprop(net, tape, output_grad, true).params;
}

template <typename Scalar>
Matrix<Scalar> input_grad(const Mlp<Scalar>& net, const Tape<Scalar>& tape, const Matrix<Scalar>& output_grad) {
  return backprop(net, tape, output_grad, false).input;
}

/// Xavier-style Gaussian initialization. The Glorot normal draw is rescaled
/// so every layer ends up with weight standard deviation `target_std`;
/// biases are zero.
template <typename Scalar, typename Generator>
void xavier_init(Mlp<Scalar>& net, Generator& rng, double target_std = 1e-2) {
  std::normal_distribution<double> unit(0.0, 1.0);
  for (auto& layer : net.layers()) {
    const double fan = static_cast<double>(layer.weight.rows() + layer.weight.cols());
    const double glorot = std::sqrt(2.0 / fan);
    const double rescale = target_std / glorot;
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
        layer.weight(r, c) = static_cast<Scalar>(unit(rng) * glorot * rescale);
    layer.bias.setZero();
  }
}

/// target <- tau * source + (1 - tau) * target, parameter-wise.
template <typename Scalar>
void soft_update(Mlp<Scalar>& target, const Mlp<Scalar>& source, Scalar tau) {
  if (!target.same_shape(source)) throw std::invalid_argument("soft_update: network shapes differ");
  if (!(tau >= Scalar(0) && tau <= Scalar(1))) throw std::invalid_argument("soft_update: tau must lie in [0, 1]");
  auto& dst = target.layers();
  const auto& src = source.layers();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i].weight = tau * src[i].weight + (Scalar(1) - tau) * dst[i].weight;
    dst[i].bias = tau * src[i].bias + (Scalar(1) - tau) * dst[i].bias;
  }
}

template <typename Scalar>
Gradients<Scalar> zeros_like(const Mlp<Scalar>& net) {
  Gradients<Scalar> g(net.layers().size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i].weight = Matrix<Scalar>::Zero(net.layers()[i].weight.rows(), net.layers()[i].weight.cols());
    g[i].bias = Vector<Scalar>::Zero(net.layers()[i].bias.size());
  }
  return g;
}

/// Flat view of all parameters in layer order (weights column-major, then bias).
template <typename Scalar>
Vector<Scalar> flatten(const Mlp<Scalar>& net) {
  Vector<Scalar> out(net.parameter_count());
  Eigen::Index at = 0;
  for (const auto& l : net.layers()) {
    out.segment(at, l.weight.size()) = l.weight.reshaped();
    at += l.weight.size();
    out.segment(at, l.bias.size()) = l.bias;
    at += l.bias.size();
  }
  return out;
}

template <typename Scalar>
Vector<Scalar> flatten(const Gradients<Scalar>& grads) {
  Eigen::Index n = 0;
  for (const auto& l : grads) n += l.weight.size() + l.bias.size();
  Vector<Scalar> out(n);
  Eigen::Index at = 0;
  for (const auto& l : grads) {
    out.segment(at, l.weight.size()) = l.weight.reshaped();
    at += l.weight.size();
    out.segment(at, l.bias.size()) = l.bias;
    at += l.bias.size();
  }
  return out;
}

}  // namespace vnflab::nn
