#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lftc/error.hpp"

namespace lftc {

// One video as a T x d feature matrix, one row per second, row-major storage.
// Frame indices are 1-based throughout the public API.
struct VideoFeatures {
  std::string id;
  int T = 0;
  int d = 0;
  std::vector<float> data;  // T*d floats, frame-major

  const float* frame(int t) const {
    return data.data() + static_cast<std::size_t>(t - 1) * d;
  }
  float* frame(int t) {
    return data.data() + static_cast<std::size_t>(t - 1) * d;
  }

  // Structural consistency: positive dims, matching buffer, finite entries.
  void validate_shape() const;
  // Full invariant: validate_shape plus T >= 3 (the minimum labelable length).
  void validate() const;
};

// The (s1, a, s2) triple: initial state, action, end state. 1-based,
// feasible iff 1 <= s1 < a < s2 <= T.
struct TemporalLabel {
  int s1 = 0;
  int a = 0;
  int s2 = 0;

  bool feasible(int T) const { return 1 <= s1 && s1 < a && a < s2 && s2 <= T; }
  void validate(int T) const;

  friend bool operator==(const TemporalLabel&, const TemporalLabel&) = default;
};

// Exemplar feature vectors for the initial state (E1) and the end state (E2).
struct ExemplarSet {
  int d = 0;
  std::vector<std::vector<float>> initial;  // 1..5 vectors of d floats
  std::vector<std::vector<float>> end;      // 1..5 vectors of d floats

  void validate() const;
};

// Per-second annotation string over {'b','i','a','e'}:
// background, initial state, action, end state.
struct GroundTruth {
  std::string seq;

  int size() const { return static_cast<int>(seq.size()); }
  char at(int t) const { return seq[static_cast<std::size_t>(t) - 1]; }
  bool contains(char c) const { return seq.find(c) != std::string::npos; }
  int count(char c) const;

  void validate() const;
};

struct HyperParams {
  int delta = 2;           // positive-window half-width
  int kappa = 60;          // action-negative offset
  double lambda = 0.2;     // action-loss weight
  double mu = 10.0;        // action-positive weight
  double tau = 0.001;      // relevance-weight temperature
  double lr = 0.01;        // step size (not pinned by the method; see README)
  double momentum = 0.9;
  double l2 = 0.001;
  int batch_size = 48;
  int epochs = 100;
  int hidden_dim = 512;
  double aug_sigma = 0.0;  // feature-space noise std, 0 disables
  std::int64_t seed = 0;

  void validate() const;
};

}  // namespace lftc
