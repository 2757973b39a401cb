#include "lftc/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lftc/error.hpp"

namespace lftc {

namespace {

// All validation happens before the parallel loops; a throw inside an OpenMP
// region would terminate the process.

inline void score_one_frame(const ModelParams& m, const VideoFeatures& v, int t,
                            FrameScores& out) {
  const std::span<const float> x(v.frame(t), static_cast<std::size_t>(v.d));
  const ForwardOutputs o = forward(m, x);
  out.h1[t - 1] = o.h1;
  out.g[t - 1] = o.g;
  out.h2[t - 1] = o.h2;
}

std::vector<double> group_norms(const std::vector<std::vector<float>>& group) {
  std::vector<double> out;
  out.reserve(group.size());
  for (const auto& vec : group) {
    double acc = 0.0;
    for (float f : vec) acc += static_cast<double>(f) * f;
    const double norm = std::sqrt(acc);
    if (norm == 0.0) fail(ErrorKind::Data, "exemplar with zero norm");
    out.push_back(norm);
  }
  return out;
}

std::vector<double> frame_norms(const VideoFeatures& v) {
  std::vector<double> out(v.T);
  for (int t = 1; t <= v.T; ++t) {
    const float* x = v.frame(t);
    double acc = 0.0;
    for (int k = 0; k < v.d; ++k) acc += static_cast<double>(x[k]) * x[k];
    if (acc == 0.0) {
      fail(ErrorKind::Data,
           "frame " + std::to_string(t) + " has zero norm, cosine undefined");
    }
    out[t - 1] = std::sqrt(acc);
  }
  return out;
}

struct SimilarityContext {
  std::vector<double> initial_norms, end_norms, x_norms;
};

inline void similarity_one_frame(const VideoFeatures& v, const ExemplarSet& e,
                                 const SimilarityContext& ctx, int t,
                                 SimilarityProfiles& out) {
  const float* x = v.frame(t);
  const double xnorm = ctx.x_norms[t - 1];
  auto summed = [&](const std::vector<std::vector<float>>& group,
                    const std::vector<double>& gnorms) {
    double total = 0.0;
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& ex = group[i];
      double dot = 0.0;
      for (int k = 0; k < v.d; ++k) {
        dot += static_cast<double>(ex[k]) * static_cast<double>(x[k]);
      }
      total += dot / (gnorms[i] * xnorm);
    }
    return total;
  };
  out.initial[t - 1] = summed(e.initial, ctx.initial_norms);
  out.end[t - 1] = summed(e.end, ctx.end_norms);
}

void check_model_input(const ModelParams& m, const VideoFeatures& v) {
  v.validate_shape();
  if (m.d != v.d) {
    fail(ErrorKind::Shape, "model dimension " + std::to_string(m.d) +
                               " != feature dimension " + std::to_string(v.d));
  }
}

SimilarityContext make_similarity_context(const VideoFeatures& v,
                                          const ExemplarSet& e) {
  v.validate_shape();
  e.validate();
  if (e.d != v.d) fail(ErrorKind::Shape, "exemplar dimension != feature dimension");
  SimilarityContext ctx;
  ctx.initial_norms = group_norms(e.initial);
  ctx.end_norms = group_norms(e.end);
  ctx.x_norms = frame_norms(v);
  return ctx;
}

}  // namespace

FrameScores score_frames_serial(const ModelParams& m, const VideoFeatures& v) {
  check_model_input(m, v);
  FrameScores out;
  out.h1.resize(v.T);
  out.g.resize(v.T);
  out.h2.resize(v.T);
  for (int t = 1; t <= v.T; ++t) score_one_frame(m, v, t, out);
  return out;
}

FrameScores score_frames(const ModelParams& m, const VideoFeatures& v, int threads) {
  if (threads <= 1) return score_frames_serial(m, v);
  check_model_input(m, v);
  FrameScores out;
  out.h1.resize(v.T);
  out.g.resize(v.T);
  out.h2.resize(v.T);
#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(static)
#endif
  for (int t = 1; t <= v.T; ++t) score_one_frame(m, v, t, out);
  return out;
}

SimilarityProfiles exemplar_similarity_serial(const VideoFeatures& v,
                                              const ExemplarSet& e) {
  const SimilarityContext ctx = make_similarity_context(v, e);
  SimilarityProfiles out;
  out.initial.resize(v.T);
  out.end.resize(v.T);
  for (int t = 1; t <= v.T; ++t) similarity_one_frame(v, e, ctx, t, out);
  return out;
}

SimilarityProfiles exemplar_similarity(const VideoFeatures& v, const ExemplarSet& e,
                                       int threads) {
  if (threads <= 1) return exemplar_similarity_serial(v, e);
  const SimilarityContext ctx = make_similarity_context(v, e);
  SimilarityProfiles out;
  out.initial.resize(v.T);
  out.end.resize(v.T);
#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(static)
#endif
  for (int t = 1; t <= v.T; ++t) similarity_one_frame(v, e, ctx, t, out);
  return out;
}

}  // namespace lftc
