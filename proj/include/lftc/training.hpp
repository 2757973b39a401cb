#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lftc/inference.hpp"
#include "lftc/manifest.hpp"
#include "lftc/model.hpp"
#include "lftc/types.hpp"

namespace lftc {

// {t : |t - center| <= delta, 1 <= t <= T}, ascending.
std::vector<int> sample_positives(int center, int delta, int T);

// For every t' in act_pos, t' - kappa and t' + kappa clamped into [1, T],
// deduplicated, minus anything inside act_pos. Ascending.
std::vector<int> sample_action_negatives(const std::vector<int>& act_pos,
                                         int kappa, int T);

struct SampledSets {
  std::vector<int> s1_pos;   // initial-state positives
  std::vector<int> s2_pos;   // end-state positives
  std::vector<int> act_pos;  // action positives
  std::vector<int> act_neg;  // action negatives
};

SampledSets build_sampled_sets(const TemporalLabel& label, int delta, int kappa,
                               int T);

struct VideoLoss {
  double loss = 0.0;
  GradientRecord grad;
};

// omega * (L_h + lambda * L_g) with L_h, L_g summed over the sampled sets.
// frame_noise, when given, is one d-vector added to every sampled frame.
VideoLoss video_loss(const ModelParams& m, const VideoFeatures& v,
                     const TemporalLabel& label, double omega,
                     const HyperParams& hp,
                     const std::vector<float>* frame_noise = nullptr);

struct TrainOptions {
  bool attend = false;          // similarity-attended labeling
  bool select_best = false;     // also return the best-precision epoch
  bool track_precision = true;  // per-epoch precision when gt is present
  int threads = 1;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  long long labels_computed = 0;  // one per video-batch membership
  std::optional<double> state_prec;
  std::optional<double> action_prec;
};

struct TrainResult {
  ModelParams final_params;
  ModelParams best_params;  // == final_params unless select_best
  int best_epoch = 0;
  std::vector<EpochStats> epochs;
};

// The alternating loop: each batch relabels its videos with the current
// classifiers, accumulates the mean of the per-video gradients, and applies
// one SGD step. omega_by_id supplies the per-video loss weights (use 1.0
// everywhere to disable noise weighting).
TrainResult train_category(const LoadedCategory& cat, const HyperParams& hp,
                           const std::map<std::string, double>& omega_by_id,
                           const TrainOptions& opts);

// Shared labeling path: score all frames, apply tracklet averaging when the
// video carries a segment partition, then the constrained argmax (attended
// when exemplars are given and attend is set).
LabeledScore label_video(const ModelParams& m, const LoadedVideo& video,
                         const ExemplarSet* exemplars, bool attend,
                         int threads = 1);

}  // namespace lftc
