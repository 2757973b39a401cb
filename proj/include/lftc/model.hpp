#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace lftc {

// Weights of one two-layer MLP: out = W2 * relu(W1 * x + b1) + b2.
template <typename Real>
struct MlpWeights {
  std::vector<Real> w1;  // hidden x d, row-major
  std::vector<Real> b1;  // hidden
  std::vector<Real> w2;  // out x hidden, row-major
  std::vector<Real> b2;  // out

  void resize(int d, int hidden, int out) {
    w1.assign(static_cast<std::size_t>(hidden) * d, Real(0));
    b1.assign(static_cast<std::size_t>(hidden), Real(0));
    w2.assign(static_cast<std::size_t>(out) * hidden, Real(0));
    b2.assign(static_cast<std::size_t>(out), Real(0));
  }
};

// State classifier (two-way softmax head) and action classifier (one-way
// sigmoid head), both applied to the same d-dimensional features.
template <typename Real>
struct Params {
  int d = 0;
  int hidden = 0;
  MlpWeights<Real> state;   // out = 2
  MlpWeights<Real> action;  // out = 1

  void resize(int d_, int hidden_) {
    d = d_;
    hidden = hidden_;
    state.resize(d_, hidden_, 2);
    action.resize(d_, hidden_, 1);
  }

  std::size_t entry_count() const {
    return state.w1.size() + state.b1.size() + state.w2.size() +
           state.b2.size() + action.w1.size() + action.b1.size() +
           action.w2.size() + action.b2.size();
  }
};

using ModelParams = Params<float>;
// Gradients and optimizer state are accumulated at 64-bit regardless of the
// parameter storage precision.
using GradientRecord = Params<double>;

// Fixed tensor traversal order; also the checkpoint serialization order.
template <typename Real>
std::array<std::vector<Real>*, 8> param_tensors(Params<Real>& p) {
  return {&p.state.w1,  &p.state.b1,  &p.state.w2,  &p.state.b2,
          &p.action.w1, &p.action.b1, &p.action.w2, &p.action.b2};
}

template <typename Real>
std::array<const std::vector<Real>*, 8> param_tensors(const Params<Real>& p) {
  return {&p.state.w1,  &p.state.b1,  &p.state.w2,  &p.state.b2,
          &p.action.w1, &p.action.b1, &p.action.w2, &p.action.b2};
}

constexpr std::array<bool, 8> kTensorIsBias = {false, true, false, true,
                                               false, true, false, true};

template <typename To, typename From>
Params<To> convert_params(const Params<From>& src) {
  Params<To> out;
  out.resize(src.d, src.hidden);
  auto in = param_tensors(src);
  auto dst = param_tensors(out);
  for (std::size_t i = 0; i < in.size(); ++i) {
    for (std::size_t j = 0; j < in[i]->size(); ++j) {
      (*dst[i])[j] = static_cast<To>((*in[i])[j]);
    }
  }
  return out;
}

}  // namespace lftc
