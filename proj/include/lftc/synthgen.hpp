#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "lftc/manifest.hpp"

namespace lftc {

// Synthetic corpus: four class centroids (background / initial / action /
// end) in feature space; clean videos embed one initial->action->end episode
// in background, noise videos are background only.
struct GenConfig {
  std::string category = "synthetic";
  int n_videos = 200;
  double noise_fraction = 0.0;
  int t_min = 40;
  int t_max = 80;
  int d = 16;
  double cluster_separation = 6.0;  // minimum pairwise centroid distance
  double frame_noise_std = 0.5;
  int exemplars_per_state = 3;  // 1..5
  double prop_initial = 0.05;   // expected label proportions per clean video
  double prop_action = 0.42;
  double prop_end = 0.12;
  std::uint64_t seed = 0;

  void validate() const;
};

// Writes feature files, exemplars + sidecar, manifest.json and
// generation_report.json under out_dir; returns the manifest. Deterministic
// per seed: every video derives its own stream (seed XOR 1-based index), so
// parallel and serial generation agree bit-exactly.
DatasetManifest generate(const GenConfig& cfg,
                         const std::filesystem::path& out_dir, int threads = 1);

}  // namespace lftc
