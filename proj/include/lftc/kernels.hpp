#pragma once

#include "lftc/inference.hpp"
#include "lftc/model.hpp"
#include "lftc/neural.hpp"
#include "lftc/types.hpp"

namespace lftc {

// Hot loops, OpenMP-parallel with serial reference twins. The parallel
// versions partition work strictly by output slot and do no cross-slot
// accumulation, so both paths are bit-identical (asserted in tests, timed
// against each other by the bench target).

// Classifier outputs for every frame of a video.
FrameScores score_frames(const ModelParams& m, const VideoFeatures& v,
                         int threads);
FrameScores score_frames_serial(const ModelParams& m, const VideoFeatures& v);

// Summed cosine similarities of every frame to both exemplar groups.
SimilarityProfiles exemplar_similarity(const VideoFeatures& v,
                                       const ExemplarSet& e, int threads);
SimilarityProfiles exemplar_similarity_serial(const VideoFeatures& v,
                                              const ExemplarSet& e);

}  // namespace lftc
