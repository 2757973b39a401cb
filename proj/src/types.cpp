#include "lftc/types.hpp"

#include <algorithm>
#include <cmath>

namespace lftc {

void VideoFeatures::validate_shape() const {
  if (T < 1 || d < 1) fail(ErrorKind::Validation, "features: T and d must be positive");
  if (data.size() != static_cast<std::size_t>(T) * d) {
    fail(ErrorKind::Validation, "features: buffer size does not match T*d");
  }
  for (float f : data) {
    if (!std::isfinite(f)) fail(ErrorKind::Data, "features: non-finite entry");
  }
}

void VideoFeatures::validate() const {
  validate_shape();
  if (T < 3) fail(ErrorKind::Validation, "features: T >= 3 required");
}

void TemporalLabel::validate(int T) const {
  if (!feasible(T)) {
    fail(ErrorKind::Validation, "label: must satisfy 1 <= s1 < a < s2 <= T");
  }
}

void ExemplarSet::validate() const {
  if (d < 1) fail(ErrorKind::Validation, "exemplars: d must be positive");
  if (initial.empty() || end.empty()) {
    fail(ErrorKind::Validation, "exemplars: both sets must be non-empty");
  }
  if (initial.size() > 5 || end.size() > 5) {
    fail(ErrorKind::Validation, "exemplars: at most 5 vectors per state");
  }
  auto check = [this](const std::vector<std::vector<float>>& group) {
    for (const auto& e : group) {
      if (e.size() != static_cast<std::size_t>(d)) {
        fail(ErrorKind::Shape, "exemplars: vector dimension mismatch");
      }
      double norm2 = 0.0;
      for (float f : e) {
        if (!std::isfinite(f)) fail(ErrorKind::Data, "exemplars: non-finite entry");
        norm2 += static_cast<double>(f) * f;
      }
      if (norm2 == 0.0) fail(ErrorKind::Validation, "exemplars: zero-norm vector");
    }
  };
  check(initial);
  check(end);
}

int GroundTruth::count(char c) const {
  return static_cast<int>(std::count(seq.begin(), seq.end(), c));
}

void GroundTruth::validate() const {
  if (seq.empty()) fail(ErrorKind::Validation, "gt: empty sequence");
  for (char c : seq) {
    if (c != 'b' && c != 'i' && c != 'a' && c != 'e') {
      fail(ErrorKind::Data, std::string("gt: unknown label character '") + c + "'");
    }
  }
}

void HyperParams::validate() const {
  if (delta < 0) fail(ErrorKind::Parameter, "delta must be >= 0");
  if (kappa < 1) fail(ErrorKind::Parameter, "kappa must be >= 1");
  if (lambda < 0) fail(ErrorKind::Parameter, "lambda must be >= 0");
  if (mu <= 0) fail(ErrorKind::Parameter, "mu must be > 0");
  if (tau <= 0) fail(ErrorKind::Parameter, "tau must be > 0");
  if (lr < 0) fail(ErrorKind::Parameter, "lr must be >= 0");
  if (momentum < 0 || momentum >= 1) fail(ErrorKind::Parameter, "momentum must be in [0, 1)");
  if (l2 < 0) fail(ErrorKind::Parameter, "l2 must be >= 0");
  if (batch_size < 1) fail(ErrorKind::Parameter, "batch_size must be >= 1");
  if (epochs < 1) fail(ErrorKind::Parameter, "epochs must be >= 1");
  if (hidden_dim < 1) fail(ErrorKind::Parameter, "hidden_dim must be >= 1");
  if (aug_sigma < 0) fail(ErrorKind::Parameter, "aug_sigma must be >= 0");
}

}  // namespace lftc
