#include <doctest.h>

#include "lftc/kernels.hpp"
#include "lftc/neural.hpp"
#include "lftc/rng.hpp"

using namespace lftc;

namespace {

VideoFeatures random_video(int T, int d, std::uint64_t seed) {
  Rng rng(seed);
  VideoFeatures v;
  v.id = "k";
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
    const int n = 1 + static_cast<int>(rng.uniform_below(5));
    for (int i = 0; i < n; ++i) {
      std::vector<float> vec(d);
      for (float& x : vec) x = static_cast<float>(rng.normal());
      (group == 0 ? e.initial : e.end).push_back(std::move(vec));
    }
  }
  return e;
}

}  // namespace

TEST_CASE("parallel frame scoring is bitwise equal to the serial reference") {
  Rng rng(61);
  for (int i = 0; i < 20; ++i) {
    const int T = static_cast<int>(rng.uniform_int(3, 120));
    const int d = static_cast<int>(rng.uniform_int(2, 32));
    const int hidden = static_cast<int>(rng.uniform_int(2, 48));
    const ModelParams m = init_params<float>(d, hidden, rng.next_u64());
    const VideoFeatures v = random_video(T, d, rng.next_u64());
    const FrameScores serial = score_frames_serial(m, v);
    for (int threads : {2, 3, 8}) {
      const FrameScores parallel = score_frames(m, v, threads);
      REQUIRE(parallel.h1 == serial.h1);
      REQUIRE(parallel.g == serial.g);
      REQUIRE(parallel.h2 == serial.h2);
    }
  }
}

TEST_CASE("parallel similarity profiles are bitwise equal to the serial reference") {
  Rng rng(62);
  for (int i = 0; i < 20; ++i) {
    const int T = static_cast<int>(rng.uniform_int(2, 150));
    const int d = static_cast<int>(rng.uniform_int(2, 32));
    const VideoFeatures v = random_video(T, d, rng.next_u64());
    const ExemplarSet e = random_exemplars(d, rng.next_u64());
    const SimilarityProfiles serial = exemplar_similarity_serial(v, e);
    for (int threads : {2, 5}) {
      const SimilarityProfiles parallel = exemplar_similarity(v, e, threads);
      REQUIRE(parallel.initial == serial.initial);
      REQUIRE(parallel.end == serial.end);
    }
  }
}

TEST_CASE("scoring validates the model dimension before the parallel loop") {
  const ModelParams m = init_params<float>(4, 4, 1);
  const VideoFeatures v = random_video(10, 6, 2);
  CHECK_THROWS_AS(score_frames(m, v, 2), Error);
  CHECK_THROWS_AS(score_frames_serial(m, v), Error);
}
