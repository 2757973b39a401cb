// Times the OpenMP kernels against their serial reference twins and checks
// that both produce identical bits.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lftc/kernels.hpp"
#include "lftc/neural.hpp"
#include "lftc/rng.hpp"
#include "lftc/synthgen.hpp"
#include "lftc/training.hpp"

using namespace lftc;

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    best = std::min(best, ms_since(start));
  }
  return best;
}

VideoFeatures random_video(int T, int d, std::uint64_t seed) {
  Rng rng(seed);
  VideoFeatures v;
  v.id = "bench";
  v.T = T;
  v.d = d;
  v.data.resize(static_cast<std::size_t>(T) * d);
  for (float& x : v.data) x = static_cast<float>(rng.normal());
  return v;
}

ExemplarSet random_exemplars(int d, std::uint64_t seed) {
  Rng rng(seed);
  ExemplarSet e;
  e.d = d;
  for (int group = 0; group < 2; ++group) {
    for (int i = 0; i < 5; ++i) {
      std::vector<float> vec(d);
      for (float& x : vec) x = static_cast<float>(rng.normal());
      (group == 0 ? e.initial : e.end).push_back(std::move(vec));
    }
  }
  return e;
}

void row(const std::string& name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-28s %10.2f %12.2f %8.2fx   %s\n", name.c_str(), serial_ms,
              parallel_ms, serial_ms / parallel_ms, equal ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
  int threads = 2;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("parallel lane uses %d threads\n\n", threads);
  std::printf("%-28s %10s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");

  const VideoFeatures video = random_video(1200, 512, 11);
  const ExemplarSet exemplars = random_exemplars(512, 12);
  const ModelParams model = init_params<float>(512, 512, 13);

  {
    FrameScores a, b;
    const double s = time_best_of(3, [&] { a = score_frames_serial(model, video); });
    const double p = time_best_of(3, [&] { b = score_frames(model, video, threads); });
    row("score_frames", s, p, a.h1 == b.h1 && a.g == b.g && a.h2 == b.h2);
  }
  {
    SimilarityProfiles a, b;
    const double s =
        time_best_of(3, [&] { a = exemplar_similarity_serial(video, exemplars); });
    const double p =
        time_best_of(3, [&] { b = exemplar_similarity(video, exemplars, threads); });
    row("exemplar_similarity", s, p, a.initial == b.initial && a.end == b.end);
  }
  {
    // Whole training epochs: batch-parallel gradients with an ordered reduction.
    GenConfig cfg;
    cfg.n_videos = 48;
    cfg.t_min = 40;
    cfg.t_max = 80;
    cfg.d = 64;
    cfg.seed = 14;
    const auto dir = std::filesystem::temp_directory_path() / "lftc_bench_corpus";
    std::filesystem::remove_all(dir);
    const auto manifest = generate(cfg, dir, threads);
    const auto cat = load_category(manifest);
    std::map<std::string, double> omega;
    for (const auto& v : cat.videos) omega[v.id] = 1.0;
    HyperParams hp;
    hp.epochs = 3;
    hp.hidden_dim = 256;
    TrainOptions serial_opts{.track_precision = false, .threads = 1};
    TrainOptions parallel_opts{.track_precision = false, .threads = threads};
    TrainResult a, b;
    const double s = time_best_of(1, [&] { a = train_category(cat, hp, omega, serial_opts); });
    const double p = time_best_of(1, [&] { b = train_category(cat, hp, omega, parallel_opts); });
    const bool equal = a.final_params.state.w1 == b.final_params.state.w1 &&
                       a.final_params.action.w1 == b.final_params.action.w1;
    row("train_category (3 epochs)", s, p, equal);
    std::filesystem::remove_all(dir);
  }
  return 0;
}
