#include "lftc/evaluation.hpp"

#include <algorithm>

#include "lftc/error.hpp"
#include "lftc/rng.hpp"

namespace lftc {

PrecisionPair video_precision(const TemporalLabel& label, const GroundTruth& gt) {
  const int T = gt.size();
  if (T < 1) fail(ErrorKind::Shape, "video_precision: empty gt");
  label.validate(T);
  PrecisionPair p;
  p.action = gt.at(label.a) == 'a' ? 1.0 : 0.0;
  p.state = (gt.at(label.s1) == 'i' ? 0.5 : 0.0) + (gt.at(label.s2) == 'e' ? 0.5 : 0.0);
  return p;
}

VideoEval evaluate_video(const std::string& id, const TemporalLabel& label,
                         const GroundTruth& gt) {
  VideoEval e;
  e.id = id;
  const PrecisionPair p = video_precision(label, gt);
  e.state_prec = p.state;
  e.action_prec = p.action;
  e.state_eligible = gt.contains('i') || gt.contains('e');
  e.action_eligible = gt.contains('a');
  return e;
}

PrecisionResult aggregate(
    const std::map<std::string, std::vector<VideoEval>>& by_category) {
  if (by_category.empty()) fail(ErrorKind::Contract, "aggregate: no categories");
  PrecisionResult res;
  double macro_state_sum = 0.0, macro_action_sum = 0.0;
  int state_cats = 0, action_cats = 0;

  for (const auto& [name, evals] : by_category) {
    if (evals.empty()) fail(ErrorKind::Contract, "aggregate: empty category '" + name + "'");
    CategoryPrecision cp;
    double state_sum = 0.0, action_sum = 0.0;
    for (const auto& e : evals) {
      if (e.state_eligible) {
        state_sum += e.state_prec;
        ++cp.n_state;
      }
      if (e.action_eligible) {
        action_sum += e.action_prec;
        ++cp.n_action;
      }
    }
    if (cp.n_state > 0) {
      cp.state_prec = state_sum / cp.n_state;
      macro_state_sum += *cp.state_prec;
      ++state_cats;
    } else {
      res.warnings.push_back("category '" + name +
                             "' has no state-eligible videos; excluded from macro mean");
    }
    if (cp.n_action > 0) {
      cp.action_prec = action_sum / cp.n_action;
      macro_action_sum += *cp.action_prec;
      ++action_cats;
    } else {
      res.warnings.push_back("category '" + name +
                             "' has no action-eligible videos; excluded from macro mean");
    }
    res.per_category[name] = cp;
  }
  if (state_cats > 0) res.macro_state = macro_state_sum / state_cats;
  if (action_cats > 0) res.macro_action = macro_action_sum / action_cats;
  return res;
}

std::uint64_t feasible_triple_count(int T) {
  if (T < 3) return 0;
  const std::uint64_t n = static_cast<std::uint64_t>(T);
  // n(n-1)(n-2)/6 without intermediate overflow: n(n-1)/2 is exact.
  return (n * (n - 1) / 2) * (n - 2) / 3;
}

TemporalLabel unrank_triple(int T, std::uint64_t k) {
  if (T < 3) fail(ErrorKind::Contract, "unrank_triple: T >= 3 required");
  if (k >= feasible_triple_count(T)) {
    fail(ErrorKind::Contract, "unrank_triple: rank out of range");
  }
  int s1 = 1;
  while (true) {
    const std::uint64_t rest = static_cast<std::uint64_t>(T - s1);
    const std::uint64_t pairs = rest * (rest - 1) / 2;  // choices of (a, s2) above s1
    if (k < pairs) break;
    k -= pairs;
    ++s1;
  }
  int a = s1 + 1;
  while (true) {
    const std::uint64_t tails = static_cast<std::uint64_t>(T - a);  // s2 choices
    if (k < tails) break;
    k -= tails;
    ++a;
  }
  const int s2 = a + 1 + static_cast<int>(k);
  return {s1, a, s2};
}

PrecisionResult random_constrained_baseline(
    const std::vector<BaselineVideo>& videos, int trials, std::uint64_t seed,
    std::vector<std::string>* skipped,
    const std::function<void(const std::string&, int, const TemporalLabel&)>& on_draw) {
  if (trials < 1) fail(ErrorKind::Contract, "baseline: trials must be >= 1");
  if (videos.empty()) fail(ErrorKind::Contract, "baseline: no videos");

  Rng rng(seed);
  std::map<std::string, std::vector<VideoEval>> grouped;
  for (const auto& bv : videos) {
    bv.gt.validate();
    const int T = bv.gt.size();
    if (T < 3) {
      if (skipped) skipped->push_back(bv.id);
      continue;
    }
    const std::uint64_t total = feasible_triple_count(T);
    double state_sum = 0.0, action_sum = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      const TemporalLabel label = unrank_triple(T, rng.uniform_below(total));
      if (on_draw) on_draw(bv.id, trial, label);
      const PrecisionPair p = video_precision(label, bv.gt);
      state_sum += p.state;
      action_sum += p.action;
    }
    VideoEval e;
    e.id = bv.id;
    e.state_prec = state_sum / trials;
    e.action_prec = action_sum / trials;
    e.state_eligible = bv.gt.contains('i') || bv.gt.contains('e');
    e.action_eligible = bv.gt.contains('a');
    grouped[bv.category].push_back(std::move(e));
  }
  if (grouped.empty()) {
    fail(ErrorKind::Data, "baseline: every video was too short to label");
  }
  return aggregate(grouped);
}

}  // namespace lftc
