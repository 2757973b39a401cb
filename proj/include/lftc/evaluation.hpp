#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lftc/types.hpp"

namespace lftc {

struct PrecisionPair {
  double state = 0.0;   // 0, 0.5 or 1
  double action = 0.0;  // 0 or 1
};

// action: 1 iff gt[a] == 'a'. state: 0.5 per matching state location.
PrecisionPair video_precision(const TemporalLabel& label, const GroundTruth& gt);

struct VideoEval {
  std::string id;
  double state_prec = 0.0;
  double action_prec = 0.0;
  bool state_eligible = false;   // gt has at least one 'i' or 'e' second
  bool action_eligible = false;  // gt has at least one 'a' second
};

VideoEval evaluate_video(const std::string& id, const TemporalLabel& label,
                         const GroundTruth& gt);

struct CategoryPrecision {
  std::optional<double> state_prec;
  std::optional<double> action_prec;
  int n_state = 0;   // eligible videos per metric
  int n_action = 0;
};

struct PrecisionResult {
  std::map<std::string, CategoryPrecision> per_category;
  std::optional<double> macro_state;
  std::optional<double> macro_action;
  std::vector<std::string> warnings;
};

// Category means over eligible videos, then the unweighted macro mean over
// categories. A category with no eligible video for a metric is absent from
// that macro mean (with a warning).
PrecisionResult aggregate(
    const std::map<std::string, std::vector<VideoEval>>& by_category);

// Number of feasible triples, C(T, 3).
std::uint64_t feasible_triple_count(int T);

// k-th triple (0-based) in lexicographic order; exact-uniform sampling is
// unranking a uniform k.
TemporalLabel unrank_triple(int T, std::uint64_t k);

struct BaselineVideo {
  std::string id;
  std::string category;
  GroundTruth gt;
};

// Chance performance under the ordering constraint: per video, `trials`
// uniform draws from the feasible set, precision averaged over draws.
// Videos shorter than 3 seconds are skipped (collected into `skipped`).
// on_draw, when set, observes every drawn label.
PrecisionResult random_constrained_baseline(
    const std::vector<BaselineVideo>& videos, int trials, std::uint64_t seed,
    std::vector<std::string>* skipped = nullptr,
    const std::function<void(const std::string& id, int trial,
                             const TemporalLabel&)>& on_draw = nullptr);

}  // namespace lftc
