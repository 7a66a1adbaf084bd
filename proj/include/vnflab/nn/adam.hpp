#pragma once

#include "vnflab/nn/mlp.hpp"

#include <cmath>
#include <cstdint>

namespace vnflab::nn {

template <typename Scalar = double>
struct AdamState {
  Gradients<Scalar> m;  // first moments
  Gradients<Scalar> v;  // second moments
  std::int64_t step = 0;
  Scalar lr = Scalar(1e-3);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);

  friend bool operator==(const AdamState& a, const AdamState& b) {
    if (a.step != b.step || a.lr != b.lr || a.beta1 != b.beta1 || a.beta2 != b.beta2 || a.eps != b.eps) return false;
    if (a.m.size() != b.m.size()) return false;
    for (std::size_t i = 0; i < a.m.size(); ++i) {
      if (a.m[i].weight != b.m[i].weight || a.m[i].bias != b.m[i].bias) return false;
      if (a.v[i].weight != b.v[i].weight || a.v[i].bias != b.v[i].bias) return false;
    }
    return true;
  }
};

template <typename Scalar>
AdamState<Scalar> make_adam(const Mlp<Scalar>& net, Scalar lr) {
  AdamState<Scalar> s;
  s.m = zeros_like(net);
  s.v = zeros_like(net);
  s.lr = lr;
  return s;
}

/// One bias-corrected Adam descent step: params -= lr * m_hat / (sqrt(v_hat) + eps).
template <typename Scalar>
void adam_step(Mlp<Scalar>& net, AdamState<Scalar>& state, const Gradients<Scalar>& grads) {
  auto& layers = net.layers();
  if (grads.size() != layers.size() || state.m.size() != layers.size())
    throw std::invalid_argument("adam_step: gradient/optimizer shape mismatch");
  ++state.step;
  const Scalar t = static_cast<Scalar>(state.step);
  const Scalar c1 = Scalar(1) - std::pow(state.beta1, t);
  const Scalar c2 = Scalar(1) - std::pow(state.beta2, t);
  const Scalar b1 = state.beta1, b2 = state.beta2, lr = state.lr, eps = state.eps;

  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weight, state.m[i].weight, state.v[i].weight, grads[i].weight);
    update(layers[i].bias, state.m[i].bias, state.v[i].bias, grads[i].bias);
  }
}

}  // namespace vnflab::nn
