#pragma once

// Textual checkpoint format. A network is written as
//
//   mlp <head> <layers> <scale-count> <scale...>
//   layer <in> <out>
//   <out*in weights, row-major>
//   <out biases>
//
// with every value rendered at round-trip precision.

#include "vnflab/nn/adam.hpp"
#include "vnflab/nn/mlp.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace vnflab::nn {

namespace detail {

template <typename Scalar>
void write_dense(std::ostream& os, const Dense<Scalar>& d) {
  for (Eigen::Index r = 0; r < d.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.weight.cols(); ++c) os << (c ? " " : "") << d.weight(r, c);
    os << '\n';
  }
  for (Eigen::Index r = 0; r < d.bias.size(); ++r) os << (r ? " " : "") << d.bias(r);
  os << '\n';
}

template <typename Scalar>
void read_dense(std::istream& is, Dense<Scalar>& d) {
  for (Eigen::Index r = 0; r < d.weight.rows(); ++r)
    for (Eigen::Index c = 0; c < d.weight.cols(); ++c) is >> d.weight(r, c);
  for (Eigen::Index r = 0; r < d.bias.size(); ++r) is >> d.bias(r);
  if (!is) throw std::runtime_error("checkpoint: truncated parameter block");
}

inline void expect_token(std::istream& is, const std::string& want) {
  std::string got;
  is >> got;
  if (got != want) throw std::runtime_error("checkpoint: expected '" + want + "', found '" + got + "'");
}

}  // namespace detail

template <typename Scalar>
void write_mlp(std::ostream& os, const Mlp<Scalar>& net) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(std::numeric_limits<Scalar>::max_digits10);
  os << "mlp " << head_name(net.head()) << ' ' << net.layers().size() << ' ' << net.scale().size();
  for (Eigen::Index i = 0; i < net.scale().size(); ++i) os << ' ' << net.scale()(i);
  os << '\n';
  for (const auto& layer : net.layers()) {
    os << "layer " << layer.weight.cols() << ' ' << layer.weight.rows() << '\n';
    detail::write_dense(os, layer);
  }
  os.flags(flags);
  os.precision(prec);
}

template <typename Scalar = double>
Mlp<Scalar> read_mlp(std::istream& is) {
  detail::expect_token(is, "mlp");
  std::string head;
  std::size_t n_layers = 0;
  Eigen::Index n_scale = 0;
  is >> head >> n_layers >> n_scale;
  if (!is || n_layers == 0) throw std::runtime_error("checkpoint: malformed mlp header");
  Vector<Scalar> scale(n_scale);
  for (Eigen::Index i = 0; i < n_scale; ++i) is >> scale(i);
  std::vector<Eigen::Index> dims;
  std::vector<Dense<Scalar>> blocks(n_layers);
  for (std::size_t i = 0; i < n_layers; ++i) {
    detail::expect_token(is, "layer");
    Eigen::Index in = 0, out = 0;
    is >> in >> out;
    if (!is || in <= 0 || out <= 0) throw std::runtime_error("checkpoint: malformed layer header");
    if (i == 0) dims.push_back(in);
    else if (dims.back() != in) throw std::runtime_error("checkpoint: incompatible consecutive layers");
    dims.push_back(out);
    blocks[i].weight.resize(out, in);
    blocks[i].bias.resize(out);
    detail::read_dense(is, blocks[i]);
  }
  Mlp<Scalar> net(dims, parse_head(head), scale);
  net.layers() = std::move(blocks);
  return net;
}

template <typename Scalar>
void write_adam(std::ostream& os, const AdamState<Scalar>& s) {
  const auto prec = os.precision();
  os << std::setprecision(std::numeric_limits<Scalar>::max_digits10);
  os << "adam " << s.step << ' ' << s.lr << ' ' << s.beta1 << ' ' << s.beta2 << ' ' << s.eps << ' ' << s.m.size()
     << '\n';
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    os << "moments " << s.m[i].weight.cols() << ' ' << s.m[i].weight.rows() << '\n';
    detail::write_dense(os, s.m[i]);
    detail::write_dense(os, s.v[i]);
  }
  os.precision(prec);
}

template <typename Scalar = double>
AdamState<Scalar> read_adam(std::istream& is) {
  detail::expect_token(is, "adam");
  AdamState<Scalar> s;
  std::size_t n = 0;
  is >> s.step >> s.lr >> s.beta1 >> s.beta2 >> s.eps >> n;
  if (!is) throw std::runtime_error("checkpoint: malformed adam header");
  s.m.resize(n);
  s.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    detail::expect_token(is, "moments");
    Eigen::Index in = 0, out = 0;
    is >> in >> out;
    for (auto* d : {&s.m[i], &s.v[i]}) {
      d->weight.resize(out, in);
      d->bias.resize(out);
      detail::read_dense(is, *d);
    }
  }
  return s;
}

}  // namespace vnflab::nn
