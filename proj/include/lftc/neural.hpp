#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lftc/model.hpp"

namespace lftc {

// He-normal weights (std = sqrt(2 / fan_in)), zero biases. Same seed, same
// bits. The 64-bit instantiation exists for finite-difference verification.
template <typename Real>
Params<Real> init_params(int d, int hidden, std::uint64_t seed);

struct ForwardOutputs {
  double h1 = 0.0;  // initial-state probability (softmax)
  double h2 = 0.0;  // end-state probability, h1 + h2 == 1
  double g = 0.0;   // action probability (sigmoid)
};

template <typename Real>
ForwardOutputs forward(const Params<Real>& m, std::span<const Real> x);

// What a frame is supervised as.
enum class Role { State1, State2, ActionPos, ActionNeg };

template <typename Real>
struct LossItem {
  std::span<const Real> x;
  Role role = Role::State1;
  double weight = 1.0;  // already includes omega / lambda / mu factors
};

// Cross-entropy per role: State1 -> -w log h1, State2 -> -w log h2,
// ActionPos -> -w log g, ActionNeg -> -w log(1 - g). Probabilities are
// clamped to [1e-7, 1 - 1e-7] before the log.
template <typename Real>
double batch_loss(const Params<Real>& m, std::span<const LossItem<Real>> items);

template <typename Real>
struct BackwardResult {
  double loss = 0.0;
  GradientRecord grad;
};

// Loss plus exact analytic gradients of the summed weighted terms.
template <typename Real>
BackwardResult<Real> backward(const Params<Real>& m,
                              std::span<const LossItem<Real>> items);

struct OptimizerState {
  GradientRecord velocity;
  double lr = 0.0;
  double momentum = 0.0;
  double l2 = 0.0;
};

OptimizerState make_optimizer(const ModelParams& m, double lr, double momentum,
                              double l2);

// v <- momentum * v + (grad + l2 * w); w <- w - lr * v.
// L2 skips biases. Mutates m and opt in place.
void sgd_step(ModelParams& m, const GradientRecord& grad, OptimizerState& opt);

// Central finite differences of batch_loss against the analytic gradients,
// every entry, at 64-bit parameters.
struct GradCheckConfig {
  int trials = 20;
  int min_d = 3, max_d = 10;
  int min_hidden = 2, max_hidden = 8;
  double step = 1e-5;
  double rel_tol = 1e-4;
  double abs_floor = 1e-7;
  std::uint64_t seed = 20240901;
};

struct GradCheckReport {
  bool pass = false;
  double max_rel_error = 0.0;  // |analytic - fd| / max(|analytic|, |fd|, floor)
  double max_abs_error = 0.0;
  long long entries_checked = 0;
  int failures = 0;
};

GradCheckReport run_gradient_check(const GradCheckConfig& cfg);

}  // namespace lftc
