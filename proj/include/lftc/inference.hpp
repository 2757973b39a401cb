#pragma once

#include <vector>

#include "lftc/types.hpp"

namespace lftc {

// Per-frame classifier outputs for one video; all sequences share length T.
struct FrameScores {
  std::vector<double> h1;  // initial-state score per frame
  std::vector<double> g;   // action score per frame
  std::vector<double> h2;  // end-state score per frame

  int size() const { return static_cast<int>(g.size()); }
};

struct LabeledScore {
  TemporalLabel label;
  double score = 0.0;
};

// Maximizes h1[s1] * g[a] * h2[s2] over 1 <= s1 < a < s2 <= T in O(T) using
// prefix extrema of h1 and suffix extrema of h2. Ties resolve to the
// lexicographically smallest triple.
LabeledScore label_argmax(const FrameScores& scores);

// Same maximization with h1 and h2 reweighted per frame by exemplar
// similarities (sim may be negative, so min-extrema matter too).
LabeledScore label_argmax_attended(const FrameScores& scores,
                                   const std::vector<double>& sim1,
                                   const std::vector<double>& sim2);

// Score of the best feasible triple; ranks videos within a category.
double prediction_score(const FrameScores& scores);

// max over t < t' of a[t] * b[t'], tracking prefix max AND min of a since
// either sequence may be negative. Ties resolve to the smallest (t, t').
struct OrderedPairMax {
  int first = 0;
  int second = 0;
  double value = 0.0;
};
OrderedPairMax max_ordered_pair_product(const std::vector<double>& a,
                                        const std::vector<double>& b);

// Summed cosine similarity of every frame to the initial (E1) and end (E2)
// exemplars. Declared in kernels.hpp; forwarded here for the two consumers.
struct SimilarityProfiles {
  std::vector<double> initial;  // A[t] = sum_{e in E1} cos(e, x_t)
  std::vector<double> end;      // B[t] = sum_{e in E2} cos(e, x_t)
};

// r_v = max_{t<t'} A[t] * B[t'].
double relevance_score(const VideoFeatures& v, const ExemplarSet& e,
                       int threads = 1);

// Argmax pair of the relevance objective: the exemplar-only state prediction.
struct StatePair {
  int s1 = 0;
  int s2 = 0;
};
StatePair exemplar_baseline_label(const VideoFeatures& v, const ExemplarSet& e,
                                  int threads = 1);

// Contiguous 1-based inclusive frame range.
struct FrameRange {
  int first = 0;
  int last = 0;
};

std::vector<FrameRange> ranges_from_run_lengths(const std::vector<int>& runs,
                                                int T);

// Replaces every score inside each segment by the segment mean. The segments
// must partition [1, T] exactly.
FrameScores segment_average(const FrameScores& scores,
                            const std::vector<FrameRange>& segments);
std::vector<double> segment_average_values(const std::vector<double>& values,
                                           const std::vector<FrameRange>& segments);

}  // namespace lftc
