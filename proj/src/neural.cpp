#include "lftc/neural.hpp"

#include <algorithm>
#include <cmath>

#include "lftc/error.hpp"
#include "lftc/rng.hpp"
#include "lftc/weighting.hpp"

namespace lftc {

namespace {

constexpr double kProbClamp = 1e-7;

inline double clamp_prob(double p) {
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

// Hidden layer: relu(W1 x + b1), accumulated at 64-bit.
template <typename Real>
void hidden_forward(const MlpWeights<Real>& w, std::span<const Real> x, int d,
                    int hidden, std::vector<double>& pre,
                    std::vector<double>& act) {
  pre.resize(hidden);
  act.resize(hidden);
  for (int j = 0; j < hidden; ++j) {
    double acc = static_cast<double>(w.b1[j]);
    const Real* row = w.w1.data() + static_cast<std::size_t>(j) * d;
    for (int k = 0; k < d; ++k) {
      acc += static_cast<double>(row[k]) * static_cast<double>(x[k]);
    }
    pre[j] = acc;
    act[j] = acc > 0.0 ? acc : 0.0;
  }
}

template <typename Real>
void head_logits(const MlpWeights<Real>& w, const std::vector<double>& act,
                 int hidden, int out, double* logits) {
  for (int o = 0; o < out; ++o) {
    double acc = static_cast<double>(w.b2[o]);
    const Real* row = w.w2.data() + static_cast<std::size_t>(o) * hidden;
    for (int j = 0; j < hidden; ++j) acc += static_cast<double>(row[j]) * act[j];
    logits[o] = acc;
  }
}

struct StateForward {
  std::vector<double> pre, act;
  double l1 = 0.0, l2 = 0.0;  // logits
  double h1 = 0.0, h2 = 0.0;
};

struct ActionForward {
  std::vector<double> pre, act;
  double logit = 0.0;
  double g = 0.0;
};

template <typename Real>
void state_forward(const Params<Real>& m, std::span<const Real> x, StateForward& f) {
  hidden_forward(m.state, x, m.d, m.hidden, f.pre, f.act);
  double logits[2];
  head_logits(m.state, f.act, m.hidden, 2, logits);
  f.l1 = logits[0];
  f.l2 = logits[1];
  const double mx = std::max(f.l1, f.l2);
  const double e1 = std::exp(f.l1 - mx);
  const double e2 = std::exp(f.l2 - mx);
  f.h1 = e1 / (e1 + e2);
  f.h2 = e2 / (e1 + e2);
}

template <typename Real>
void action_forward(const Params<Real>& m, std::span<const Real> x, ActionForward& f) {
  hidden_forward(m.action, x, m.d, m.hidden, f.pre, f.act);
  double logit;
  head_logits(m.action, f.act, m.hidden, 1, &logit);
  f.logit = logit;
  f.g = stable_sigmoid(logit);
}

template <typename Real>
void check_input(const Params<Real>& m, std::span<const Real> x) {
  if (static_cast<int>(x.size()) != m.d) {
    fail(ErrorKind::Shape, "forward: input length != model dimension");
  }
}

// Backprop through one MLP given d(loss)/d(logits); accumulates into grad.
template <typename Real>
void head_backward(const MlpWeights<Real>& w, std::span<const Real> x,
                   const std::vector<double>& pre, const std::vector<double>& act,
                   const double* dlogits, int d, int hidden, int out,
                   MlpWeights<double>& grad, std::vector<double>& dhidden) {
  dhidden.assign(hidden, 0.0);
  for (int o = 0; o < out; ++o) {
    const double dl = dlogits[o];
    grad.b2[o] += dl;
    double* grow = grad.w2.data() + static_cast<std::size_t>(o) * hidden;
    const Real* wrow = w.w2.data() + static_cast<std::size_t>(o) * hidden;
    for (int j = 0; j < hidden; ++j) {
      grow[j] += dl * act[j];
      dhidden[j] += dl * static_cast<double>(wrow[j]);
    }
  }
  for (int j = 0; j < hidden; ++j) {
    if (pre[j] <= 0.0) continue;  // relu gate
    const double dz = dhidden[j];
    grad.b1[j] += dz;
    double* grow = grad.w1.data() + static_cast<std::size_t>(j) * d;
    for (int k = 0; k < d; ++k) grow[k] += dz * static_cast<double>(x[k]);
  }
}

}  // namespace

template <typename Real>
Params<Real> init_params(int d, int hidden, std::uint64_t seed) {
  if (d < 1 || hidden < 1) fail(ErrorKind::Contract, "init_params: d, hidden >= 1");
  Params<Real> m;
  m.resize(d, hidden);
  Rng rng(seed);
  const double std1 = std::sqrt(2.0 / d);
  const double std2 = std::sqrt(2.0 / hidden);
  auto fill = [&rng](std::vector<Real>& w, double std) {
    for (Real& v : w) v = static_cast<Real>(rng.normal() * std);
  };
  fill(m.state.w1, std1);
  fill(m.state.w2, std2);
  fill(m.action.w1, std1);
  fill(m.action.w2, std2);
  return m;
}

template <typename Real>
ForwardOutputs forward(const Params<Real>& m, std::span<const Real> x) {
  check_input(m, x);
  StateForward sf;
  ActionForward af;
  state_forward(m, x, sf);
  action_forward(m, x, af);
  return {sf.h1, sf.h2, af.g};
}

template <typename Real>
double batch_loss(const Params<Real>& m, std::span<const LossItem<Real>> items) {
  double loss = 0.0;
  StateForward sf;
  ActionForward af;
  for (const auto& it : items) {
    check_input(m, it.x);
    if (it.weight < 0) fail(ErrorKind::Contract, "loss item: negative weight");
    switch (it.role) {
      case Role::State1:
        state_forward(m, it.x, sf);
        loss += -it.weight * std::log(clamp_prob(sf.h1));
        break;
      case Role::State2:
        state_forward(m, it.x, sf);
        loss += -it.weight * std::log(clamp_prob(sf.h2));
        break;
      case Role::ActionPos:
        action_forward(m, it.x, af);
        loss += -it.weight * std::log(clamp_prob(af.g));
        break;
      case Role::ActionNeg:
        action_forward(m, it.x, af);
        loss += -it.weight * std::log(clamp_prob(1.0 - af.g));
        break;
      default:
        fail(ErrorKind::Contract, "loss item: unknown role");
    }
  }
  return loss;
}

template <typename Real>
BackwardResult<Real> backward(const Params<Real>& m,
                              std::span<const LossItem<Real>> items) {
  BackwardResult<Real> out;
  out.grad.resize(m.d, m.hidden);
  StateForward sf;
  ActionForward af;
  std::vector<double> dhidden;
  for (const auto& it : items) {
    check_input(m, it.x);
    if (it.weight < 0) fail(ErrorKind::Contract, "loss item: negative weight");
    const double w = it.weight;
    switch (it.role) {
      case Role::State1:
      case Role::State2: {
        state_forward(m, it.x, sf);
        const bool first = it.role == Role::State1;
        out.loss += -w * std::log(clamp_prob(first ? sf.h1 : sf.h2));
        // d(-log h_k)/d(logits) = softmax - onehot_k
        const double dl[2] = {w * (sf.h1 - (first ? 1.0 : 0.0)),
                              w * (sf.h2 - (first ? 0.0 : 1.0))};
        head_backward(m.state, it.x, sf.pre, sf.act, dl, m.d, m.hidden, 2,
                      out.grad.state, dhidden);
        break;
      }
      case Role::ActionPos:
      case Role::ActionNeg: {
        action_forward(m, it.x, af);
        const bool pos = it.role == Role::ActionPos;
        out.loss += -w * std::log(clamp_prob(pos ? af.g : 1.0 - af.g));
        const double dl = w * (af.g - (pos ? 1.0 : 0.0));
        head_backward(m.action, it.x, af.pre, af.act, &dl, m.d, m.hidden, 1,
                      out.grad.action, dhidden);
        break;
      }
      default:
        fail(ErrorKind::Contract, "loss item: unknown role");
    }
  }
  return out;
}

OptimizerState make_optimizer(const ModelParams& m, double lr, double momentum,
                              double l2) {
  OptimizerState opt;
  opt.velocity.resize(m.d, m.hidden);
  opt.lr = lr;
  opt.momentum = momentum;
  opt.l2 = l2;
  return opt;
}

void sgd_step(ModelParams& m, const GradientRecord& grad, OptimizerState& opt) {
  if (grad.d != m.d || grad.hidden != m.hidden || opt.velocity.d != m.d ||
      opt.velocity.hidden != m.hidden) {
    fail(ErrorKind::Shape, "sgd_step: shape mismatch");
  }
  auto weights = param_tensors(m);
  auto grads = param_tensors(grad);
  auto vels = param_tensors(opt.velocity);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const bool is_bias = kTensorIsBias[i];
    auto& w = *weights[i];
    const auto& g = *grads[i];
    auto& vel = *vels[i];
    if (w.size() != g.size()) fail(ErrorKind::Shape, "sgd_step: tensor size mismatch");
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = g[j] + (is_bias ? 0.0 : opt.l2 * static_cast<double>(w[j]));
      const double v = opt.momentum * vel[j] + gj;
      vel[j] = v;
      w[j] = static_cast<float>(static_cast<double>(w[j]) - opt.lr * v);
    }
  }
}

GradCheckReport run_gradient_check(const GradCheckConfig& cfg) {
  GradCheckReport report;
  report.pass = true;
  Rng rng(cfg.seed);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const int d = static_cast<int>(rng.uniform_int(cfg.min_d, cfg.max_d));
    const int hidden = static_cast<int>(rng.uniform_int(cfg.min_hidden, cfg.max_hidden));
    Params<double> m = init_params<double>(d, hidden, rng.next_u64());

    const int n_items = static_cast<int>(rng.uniform_int(4, 12));
    std::vector<std::vector<double>> xs(n_items);
    std::vector<LossItem<double>> items(n_items);
    for (int i = 0; i < n_items; ++i) {
      xs[i].resize(d);
      for (double& v : xs[i]) v = rng.normal() * 1.5;
      // Cycle the roles so every loss term is exercised each trial.
      items[i].x = xs[i];
      items[i].role = static_cast<Role>(i % 4);
      items[i].weight = rng.uniform(0.1, 2.5);
    }

    const BackwardResult<double> analytic = backward<double>(m, items);
    auto tensors = param_tensors(m);
    auto grads = param_tensors(analytic.grad);
    for (std::size_t ti = 0; ti < tensors.size(); ++ti) {
      auto& tensor = *tensors[ti];
      const auto& gt = *grads[ti];
      for (std::size_t j = 0; j < tensor.size(); ++j) {
        const double saved = tensor[j];
        tensor[j] = saved + cfg.step;
        const double lp = batch_loss<double>(m, items);
        tensor[j] = saved - cfg.step;
        const double lm = batch_loss<double>(m, items);
        tensor[j] = saved;

        const double fd = (lp - lm) / (2.0 * cfg.step);
        const double a = gt[j];
        const double diff = std::abs(a - fd);
        const double denom = std::max({std::abs(a), std::abs(fd), cfg.abs_floor});
        const double rel = diff / denom;
        report.max_rel_error = std::max(report.max_rel_error, rel);
        report.max_abs_error = std::max(report.max_abs_error, diff);
        ++report.entries_checked;
        if (diff > std::max(cfg.rel_tol * std::max(std::abs(a), std::abs(fd)),
                            cfg.abs_floor)) {
          ++report.failures;
          report.pass = false;
        }
      }
    }
  }
  return report;
}

// The two supported precisions.
template Params<float> init_params<float>(int, int, std::uint64_t);
template Params<double> init_params<double>(int, int, std::uint64_t);
template ForwardOutputs forward<float>(const Params<float>&, std::span<const float>);
template ForwardOutputs forward<double>(const Params<double>&, std::span<const double>);
template double batch_loss<float>(const Params<float>&, std::span<const LossItem<float>>);
template double batch_loss<double>(const Params<double>&, std::span<const LossItem<double>>);
template BackwardResult<float> backward<float>(const Params<float>&,
                                               std::span<const LossItem<float>>);
template BackwardResult<double> backward<double>(const Params<double>&,
                                                 std::span<const LossItem<double>>);

}  // namespace lftc
