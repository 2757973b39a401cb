#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "lftc/error.hpp"
#include "lftc/io.hpp"
#include "lftc/synthgen.hpp"

using namespace lftc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lftc_synth_" + name);
  fs::remove_all(dir);
  return dir;
}

GenConfig small_cfg(std::uint64_t seed, double noise_fraction = 0.0) {
  GenConfig cfg;
  cfg.n_videos = 12;
  cfg.noise_fraction = noise_fraction;
  cfg.t_min = 15;
  cfg.t_max = 25;
  cfg.d = 6;
  cfg.cluster_separation = 5.0;
  cfg.frame_noise_std = 0.3;
  cfg.seed = seed;
  return cfg;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double sq_distance(const float* frame, const std::vector<double>& centroid, int d) {
  double acc = 0.0;
  for (int k = 0; k < d; ++k) {
    const double diff = frame[k] - centroid[k];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

TEST_CASE("clean corpora embed exactly one causal episode per video") {
  const fs::path dir = fresh_dir("clean");
  const DatasetManifest manifest = generate(small_cfg(1), dir);
  REQUIRE(manifest.videos.size() == 12);
  for (const auto& v : manifest.videos) {
    REQUIRE(v.gt.has_value());
    const std::string& seq = v.gt->seq;
    for (char c : {'i', 'a', 'e'}) {
      REQUIRE(seq.find(c) != std::string::npos);
    }
    // all i before all a before all e, each in one contiguous run
    const auto last_i = seq.rfind('i');
    const auto first_a = seq.find('a');
    const auto last_a = seq.rfind('a');
    const auto first_e = seq.find('e');
    REQUIRE(last_i < first_a);
    REQUIRE(last_a < first_e);
    REQUIRE(seq.find('i', first_a) == std::string::npos);
    REQUIRE(seq.find('a', first_e) == std::string::npos);
  }
}

TEST_CASE("noise-only corpora contain no episode seconds") {
  const fs::path dir = fresh_dir("noise");
  const DatasetManifest manifest = generate(small_cfg(2, 1.0), dir);
  for (const auto& v : manifest.videos) {
    REQUIRE(v.gt.has_value());
    for (char c : v.gt->seq) REQUIRE(c == 'b');
  }
}

TEST_CASE("noise fraction is honored exactly") {
  const fs::path dir = fresh_dir("half");
  const DatasetManifest manifest = generate(small_cfg(3, 0.5), dir);
  int noisy = 0;
  for (const auto& v : manifest.videos) {
    if (v.gt->seq.find('a') == std::string::npos) ++noisy;
  }
  CHECK(noisy == 6);
}

TEST_CASE("nearest-centroid classification recovers the ground truth") {
  GenConfig cfg = small_cfg(4);
  cfg.n_videos = 20;
  cfg.cluster_separation = 10.0;
  cfg.frame_noise_std = 0.1;
  const fs::path dir = fresh_dir("separated");
  const DatasetManifest manifest = generate(cfg, dir);
  const LoadedCategory cat = load_category(manifest);

  // Estimate centroids from the labelled frames themselves, then check
  // 1-NN classification against the written gt.
  std::array<std::vector<double>, 4> centroids;
  std::array<int, 4> counts{};
  auto cls_of = [](char c) {
    switch (c) {
      case 'i': return 1;
      case 'a': return 2;
      case 'e': return 3;
      default: return 0;
    }
  };
  for (auto& c : centroids) c.assign(cfg.d, 0.0);
  for (const auto& v : cat.videos) {
    for (int t = 1; t <= v.features.T; ++t) {
      const int cls = cls_of(v.gt->at(t));
      for (int k = 0; k < cfg.d; ++k) centroids[cls][k] += v.features.frame(t)[k];
      ++counts[cls];
    }
  }
  for (int c = 0; c < 4; ++c) {
    REQUIRE(counts[c] > 0);
    for (double& x : centroids[c]) x /= counts[c];
  }

  long long total = 0, correct = 0;
  for (const auto& v : cat.videos) {
    for (int t = 1; t <= v.features.T; ++t) {
      int best = 0;
      double best_d = sq_distance(v.features.frame(t), centroids[0], cfg.d);
      for (int c = 1; c < 4; ++c) {
        const double dist = sq_distance(v.features.frame(t), centroids[c], cfg.d);
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      ++total;
      if (best == cls_of(v.gt->at(t))) ++correct;
    }
  }
  CHECK(static_cast<double>(correct) / total >= 0.999);
}

TEST_CASE("regeneration with the same seed is byte-identical") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  generate(small_cfg(5), a);
  generate(small_cfg(5), b);

  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    REQUIRE(fs::exists(b / rel));
    REQUIRE(slurp(entry.path()) == slurp(b / rel));
  }
}

TEST_CASE("parallel generation matches serial bit-exactly") {
  const fs::path a = fresh_dir("thr_a");
  const fs::path b = fresh_dir("thr_b");
  generate(small_cfg(6), a, 1);
  generate(small_cfg(6), b, 2);
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    REQUIRE(slurp(entry.path()) == slurp(b / rel));
  }
}

TEST_CASE("exemplars prefer their own state centroid") {
  GenConfig cfg = small_cfg(7);
  const fs::path dir = fresh_dir("exemplars");
  const DatasetManifest manifest = generate(cfg, dir);
  const LoadedCategory cat = load_category(manifest);

  // crude class means from gt frames
  std::vector<double> mu_i(cfg.d, 0.0), mu_e(cfg.d, 0.0);
  int ni = 0, ne = 0;
  for (const auto& v : cat.videos) {
    for (int t = 1; t <= v.features.T; ++t) {
      if (v.gt->at(t) == 'i') {
        for (int k = 0; k < cfg.d; ++k) mu_i[k] += v.features.frame(t)[k];
        ++ni;
      } else if (v.gt->at(t) == 'e') {
        for (int k = 0; k < cfg.d; ++k) mu_e[k] += v.features.frame(t)[k];
        ++ne;
      }
    }
  }
  for (double& x : mu_i) x /= ni;
  for (double& x : mu_e) x /= ne;

  auto cosine = [&](const std::vector<float>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (int k = 0; k < cfg.d; ++k) {
      dot += a[k] * b[k];
      na += double(a[k]) * a[k];
      nb += b[k] * b[k];
    }
    return dot / std::sqrt(na * nb);
  };
  for (const auto& e : cat.exemplars.initial) {
    REQUIRE(cosine(e, mu_i) > cosine(e, mu_e));
  }
  for (const auto& e : cat.exemplars.end) {
    REQUIRE(cosine(e, mu_e) > cosine(e, mu_i));
  }
}

TEST_CASE("generation report echoes the resolved configuration") {
  const fs::path dir = fresh_dir("report");
  generate(small_cfg(8, 0.25), dir);
  CHECK(fs::exists(dir / "generation_report.json"));
  const auto bytes = slurp(dir / "generation_report.json");
  const std::string text(bytes.begin(), bytes.end());
  CHECK(text.find("\"n_videos\": 12") != std::string::npos);
  CHECK(text.find("\"n_noise\": 3") != std::string::npos);
}

TEST_CASE("invalid configurations are rejected") {
  GenConfig cfg = small_cfg(9);
  cfg.t_min = 5;  // below the supported minimum
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_cfg(9);
  cfg.noise_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_cfg(9);
  cfg.exemplars_per_state = 6;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_cfg(9);
  cfg.prop_action = 0.95;  // proportions sum above 1
  CHECK_THROWS_AS(cfg.validate(), Error);
}
