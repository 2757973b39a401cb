#include "lftc/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "lftc/error.hpp"
#include "lftc/io.hpp"
#include "lftc/rng.hpp"

namespace lftc {

namespace {

constexpr int kMaxPlacementRetries = 1000;

void GenConfigCheck(const GenConfig& c) {
  if (c.category.empty()) fail(ErrorKind::Config, "generate: empty category name");
  if (c.n_videos < 1) fail(ErrorKind::Config, "generate: n_videos must be >= 1");
  if (c.noise_fraction < 0.0 || c.noise_fraction > 1.0) {
    fail(ErrorKind::Config, "generate: noise_fraction must be in [0, 1]");
  }
  if (c.t_min < 10 || c.t_max < c.t_min) {
    fail(ErrorKind::Config, "generate: need 10 <= t_min <= t_max");
  }
  if (c.d < 1) fail(ErrorKind::Config, "generate: d must be >= 1");
  if (c.cluster_separation <= 0.0) {
    fail(ErrorKind::Config, "generate: cluster_separation must be > 0");
  }
  if (c.frame_noise_std <= 0.0) {
    fail(ErrorKind::Config, "generate: frame_noise_std must be > 0");
  }
  if (c.exemplars_per_state < 1 || c.exemplars_per_state > 5) {
    fail(ErrorKind::Config, "generate: exemplars_per_state must be in 1..5");
  }
  if (c.prop_initial <= 0.0 || c.prop_action <= 0.0 || c.prop_end <= 0.0 ||
      c.prop_initial + c.prop_action + c.prop_end >= 1.0) {
    fail(ErrorKind::Config, "generate: label proportions must be positive and sum below 1");
  }
}

// Background, initial, action, end.
using Centroids = std::array<std::vector<double>, 4>;

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Random directions scaled to norm == cluster_separation; redraw until every
// pair is at least cluster_separation apart.
Centroids draw_centroids(const GenConfig& cfg, Rng& rng, double& min_dist) {
  for (int attempt = 0; attempt < kMaxPlacementRetries; ++attempt) {
    Centroids c;
    bool degenerate = false;
    for (auto& centroid : c) {
      centroid.resize(cfg.d);
      double norm2 = 0.0;
      for (double& x : centroid) {
        x = rng.normal();
        norm2 += x * x;
      }
      if (norm2 == 0.0) {
        degenerate = true;
        break;
      }
      const double scale = cfg.cluster_separation / std::sqrt(norm2);
      for (double& x : centroid) x *= scale;
    }
    if (degenerate) continue;
    min_dist = distance(c[0], c[1]);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        min_dist = std::min(min_dist, distance(c[i], c[j]));
      }
    }
    if (min_dist >= cfg.cluster_separation) return c;
  }
  fail(ErrorKind::Config,
       "generate: could not place centroids at the requested separation");
}

// Geometric on {1, 2, ...} with the given mean, by inverse CDF.
int geometric_run(Rng& rng, double mean) {
  if (mean <= 1.0) return 1;
  const double q = 1.0 / mean;
  double u;
  do {
    u = rng.uniform01();
  } while (u == 0.0);
  const double len = std::ceil(std::log(u) / std::log1p(-q));
  return std::max(1, static_cast<int>(std::min(len, 1e9)));
}

struct GeneratedVideo {
  VideoFeatures features;
  std::string gt;
};

GeneratedVideo make_video(const GenConfig& cfg, const Centroids& centroids,
                          bool noisy, std::uint64_t video_seed) {
  Rng rng(video_seed);
  const int T = static_cast<int>(rng.uniform_int(cfg.t_min, cfg.t_max));

  std::string gt(static_cast<std::size_t>(T), 'b');
  if (!noisy) {
    int li = geometric_run(rng, cfg.prop_initial * T);
    int la = geometric_run(rng, cfg.prop_action * T);
    int le = geometric_run(rng, cfg.prop_end * T);
    // Shrink the longest runs until the episode fits.
    while (li + la + le > T) {
      int* longest = &li;
      if (la > *longest) longest = &la;
      if (le > *longest) longest = &le;
      --*longest;
    }
    // Background gaps between the runs, as in real footage where the camera
    // leaves the object between the states and the manipulation.
    int slack = T - (li + la + le);
    const int gap1 = std::min(slack, geometric_run(rng, 0.08 * T) - 1);
    slack -= gap1;
    const int gap2 = std::min(slack, geometric_run(rng, 0.08 * T) - 1);
    slack -= gap2;
    const int offset = static_cast<int>(rng.uniform_int(0, slack));
    std::fill_n(gt.begin() + offset, li, 'i');
    std::fill_n(gt.begin() + offset + li + gap1, la, 'a');
    std::fill_n(gt.begin() + offset + li + gap1 + la + gap2, le, 'e');
  }

  GeneratedVideo out;
  out.features.T = T;
  out.features.d = cfg.d;
  out.features.data.resize(static_cast<std::size_t>(T) * cfg.d);
  for (int t = 1; t <= T; ++t) {
    int cls = 0;
    switch (gt[t - 1]) {
      case 'i': cls = 1; break;
      case 'a': cls = 2; break;
      case 'e': cls = 3; break;
      default: cls = 0; break;
    }
    float* frame = out.features.frame(t);
    const std::vector<double>& mu = centroids[cls];
    for (int k = 0; k < cfg.d; ++k) {
      frame[k] = static_cast<float>(mu[k] + rng.normal() * cfg.frame_noise_std);
    }
  }
  out.gt = std::move(gt);
  return out;
}

ExemplarSet draw_exemplars(const GenConfig& cfg, const Centroids& centroids, Rng& rng) {
  ExemplarSet e;
  e.d = cfg.d;
  auto draw_group = [&](int own_cls, int other_cls) {
    std::vector<std::vector<float>> group;
    for (int i = 0; i < cfg.exemplars_per_state; ++i) {
      for (int attempt = 0;; ++attempt) {
        if (attempt >= kMaxPlacementRetries) {
          fail(ErrorKind::Config, "generate: exemplar margin unattainable");
        }
        std::vector<double> vec(cfg.d);
        for (int k = 0; k < cfg.d; ++k) {
          vec[k] = centroids[own_cls][k] + rng.normal() * cfg.frame_noise_std;
        }
        // Must be closer (in angle) to its own centroid than to the other.
        if (cosine(vec, centroids[own_cls]) > cosine(vec, centroids[other_cls])) {
          group.emplace_back(vec.begin(), vec.end());
          break;
        }
      }
    }
    return group;
  };
  e.initial = draw_group(1, 3);
  e.end = draw_group(3, 1);
  e.validate();
  return e;
}

std::string video_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "v%05d", index);
  return buf;
}

}  // namespace

void GenConfig::validate() const { GenConfigCheck(*this); }

DatasetManifest generate(const GenConfig& cfg, const std::filesystem::path& out_dir,
                         int threads) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "features", ec);
  if (ec) fail(ErrorKind::Io, "generate: cannot create " + (out_dir / "features").string());

  Rng master(cfg.seed);
  double min_dist = 0.0;
  const Centroids centroids = draw_centroids(cfg, master, min_dist);
  const ExemplarSet exemplars = draw_exemplars(cfg, centroids, master);

  const int n_noise =
      static_cast<int>(std::llround(cfg.noise_fraction * cfg.n_videos));
  std::vector<char> noisy(cfg.n_videos, 0);
  std::fill_n(noisy.begin(), n_noise, 1);
  master.shuffle(noisy);

  std::vector<GeneratedVideo> videos(cfg.n_videos);
  std::exception_ptr eptr = nullptr;
#ifdef _OPENMP
#pragma omp parallel for num_threads(std::max(1, threads)) schedule(static)
#endif
  for (int i = 0; i < cfg.n_videos; ++i) {
    try {
      // 1-based index so no video stream collides with the master stream.
      const std::uint64_t sub_seed = cfg.seed ^ static_cast<std::uint64_t>(i + 1);
      videos[i] = make_video(cfg, centroids, noisy[i] != 0, sub_seed);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!eptr) eptr = std::current_exception();
    }
  }
  if (eptr) std::rethrow_exception(eptr);

  DatasetManifest manifest;
  manifest.category = cfg.category;
  manifest.base_dir = out_dir;
  manifest.exemplar_features = "exemplars.lftc";
  manifest.exemplar_sidecar = "exemplars.json";
  save_exemplars(exemplars, out_dir / manifest.exemplar_features,
                 out_dir / manifest.exemplar_sidecar);

  for (int i = 0; i < cfg.n_videos; ++i) {
    const std::string id = video_id(i + 1);
    VideoEntry entry;
    entry.id = id;
    entry.features = "features/" + id + ".lftc";
    entry.gt = GroundTruth{videos[i].gt};
    videos[i].features.id = id;
    write_feature_file(videos[i].features, out_dir / entry.features);
    manifest.videos.push_back(std::move(entry));
  }
  save_manifest(manifest, out_dir / "manifest.json");

  nlohmann::json report;
  report["category"] = cfg.category;
  report["n_videos"] = cfg.n_videos;
  report["noise_fraction"] = cfg.noise_fraction;
  report["n_noise"] = n_noise;
  report["t_min"] = cfg.t_min;
  report["t_max"] = cfg.t_max;
  report["d"] = cfg.d;
  report["cluster_separation"] = cfg.cluster_separation;
  report["frame_noise_std"] = cfg.frame_noise_std;
  report["exemplars_per_state"] = cfg.exemplars_per_state;
  report["prop_initial"] = cfg.prop_initial;
  report["prop_action"] = cfg.prop_action;
  report["prop_end"] = cfg.prop_end;
  report["seed"] = cfg.seed;
  report["min_centroid_distance"] = min_dist;
  std::ofstream out(out_dir / "generation_report.json", std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "generate: cannot write generation report");
  out << report.dump(2) << '\n';

  return manifest;
}

}  // namespace lftc
