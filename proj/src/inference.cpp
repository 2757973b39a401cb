#include "lftc/inference.hpp"

#include <cmath>
#include <span>
#include <tuple>

#include "lftc/error.hpp"
#include "lftc/kernels.hpp"

namespace lftc {

namespace {

// Canonical product; the same association everywhere so that ties are exact.
inline double triple_product(double x, double y, double z) { return (x * y) * z; }
inline double pair_product(double x, double y) { return x * y; }

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorKind::Data, std::string(what) + ": non-finite score");
  }
}

int checked_length(const FrameScores& s) {
  const int T = s.size();
  if (s.h1.size() != s.g.size() || s.h2.size() != s.g.size()) {
    fail(ErrorKind::Shape, "frame scores: h1/g/h2 lengths differ");
  }
  if (T < 3) fail(ErrorKind::Contract, "frame scores: T >= 3 required");
  check_finite(s.h1, "h1");
  check_finite(s.g, "g");
  check_finite(s.h2, "h2");
  return T;
}

struct TripleCandidate {
  TemporalLabel label;
  double score = 0.0;
  bool set = false;
};

inline void consider(TripleCandidate& best, std::span<const double> h1,
                     std::span<const double> g, std::span<const double> h2,
                     int s1, int a, int s2) {
  const double p = triple_product(h1[s1 - 1], g[a - 1], h2[s2 - 1]);
  if (!best.set || p > best.score ||
      (p == best.score && std::tuple(s1, a, s2) < std::tuple(best.label.s1, best.label.a,
                                                             best.label.s2))) {
    best.label = {s1, a, s2};
    best.score = p;
    best.set = true;
  }
}

// Shared scan over feasible triples. For each action slot a the optimal
// (s1, s2) lies at an extremum of h1 on [1, a-1] and of h2 on [a+1, T]
// (values may be negative, so minima matter too). Earliest indices break
// value ties; the final (1,2,3) probe settles degenerate product ties, which
// otherwise all collapse to zero for scores in [0, 1].
LabeledScore argmax_triple(std::span<const double> h1, std::span<const double> g,
                           std::span<const double> h2) {
  const int T = static_cast<int>(g.size());

  // Suffix extrema of h2 with the earliest attaining index.
  std::vector<double> smax(T + 1), smin(T + 1);
  std::vector<int> smax_at(T + 1), smin_at(T + 1);
  smax[T] = smin[T] = h2[T - 1];
  smax_at[T] = smin_at[T] = T;
  for (int t = T - 1; t >= 1; --t) {
    const double v = h2[t - 1];
    if (v >= smax[t + 1]) {
      smax[t] = v;
      smax_at[t] = t;
    } else {
      smax[t] = smax[t + 1];
      smax_at[t] = smax_at[t + 1];
    }
    if (v <= smin[t + 1]) {
      smin[t] = v;
      smin_at[t] = t;
    } else {
      smin[t] = smin[t + 1];
      smin_at[t] = smin_at[t + 1];
    }
  }

  TripleCandidate best;
  // Running prefix extrema of h1 over [1, a-1].
  double pmax = h1[0], pmin = h1[0];
  int pmax_at = 1, pmin_at = 1;
  for (int a = 2; a <= T - 1; ++a) {
    if (a > 2) {
      const double v = h1[a - 2];  // index a-1 joins the prefix
      if (v > pmax) {
        pmax = v;
        pmax_at = a - 1;
      }
      if (v < pmin) {
        pmin = v;
        pmin_at = a - 1;
      }
    }
    consider(best, h1, g, h2, pmax_at, a, smax_at[a + 1]);
    consider(best, h1, g, h2, pmax_at, a, smin_at[a + 1]);
    consider(best, h1, g, h2, pmin_at, a, smax_at[a + 1]);
    consider(best, h1, g, h2, pmin_at, a, smin_at[a + 1]);
  }

  if (triple_product(h1[0], g[1], h2[2]) == best.score) {
    best.label = {1, 2, 3};
  }
  return {best.label, best.score};
}

}  // namespace

LabeledScore label_argmax(const FrameScores& scores) {
  const int T = checked_length(scores);
  LabeledScore out = argmax_triple(scores.h1, scores.g, scores.h2);
  out.label.validate(T);
  return out;
}

LabeledScore label_argmax_attended(const FrameScores& scores,
                                   const std::vector<double>& sim1,
                                   const std::vector<double>& sim2) {
  const int T = checked_length(scores);
  if (sim1.size() != static_cast<std::size_t>(T) ||
      sim2.size() != static_cast<std::size_t>(T)) {
    fail(ErrorKind::Shape, "attended labeling: similarity length != T");
  }
  check_finite(sim1, "sim1");
  check_finite(sim2, "sim2");

  std::vector<double> h1(scores.h1), h2(scores.h2);
  for (int t = 0; t < T; ++t) {
    h1[t] *= sim1[t];
    h2[t] *= sim2[t];
  }
  LabeledScore out = argmax_triple(h1, scores.g, h2);
  out.label.validate(T);
  return out;
}

double prediction_score(const FrameScores& scores) {
  return label_argmax(scores).score;
}

OrderedPairMax max_ordered_pair_product(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.size() != b.size()) fail(ErrorKind::Shape, "pair product: lengths differ");
  const int T = static_cast<int>(a.size());
  if (T < 2) fail(ErrorKind::Contract, "pair product: T >= 2 required");
  check_finite(a, "a");
  check_finite(b, "b");

  OrderedPairMax best;
  bool set = false;
  double pmax = a[0], pmin = a[0];
  int pmax_at = 1, pmin_at = 1;
  auto consider = [&](int t, int t2) {
    const double p = pair_product(a[t - 1], b[t2 - 1]);
    if (!set || p > best.value ||
        (p == best.value && std::tuple(t, t2) < std::tuple(best.first, best.second))) {
      best = {t, t2, p};
      set = true;
    }
  };
  for (int t2 = 2; t2 <= T; ++t2) {
    consider(pmax_at, t2);
    consider(pmin_at, t2);
    const double v = a[t2 - 1];  // index t2 joins the prefix
    if (v > pmax) {
      pmax = v;
      pmax_at = t2;
    }
    if (v < pmin) {
      pmin = v;
      pmin_at = t2;
    }
  }
  if (pair_product(a[0], b[1]) == best.value) {
    best.first = 1;
    best.second = 2;
  }
  return best;
}

double relevance_score(const VideoFeatures& v, const ExemplarSet& e, int threads) {
  SimilarityProfiles p = exemplar_similarity(v, e, threads);
  return max_ordered_pair_product(p.initial, p.end).value;
}

StatePair exemplar_baseline_label(const VideoFeatures& v, const ExemplarSet& e,
                                  int threads) {
  SimilarityProfiles p = exemplar_similarity(v, e, threads);
  OrderedPairMax m = max_ordered_pair_product(p.initial, p.end);
  return {m.first, m.second};
}

std::vector<FrameRange> ranges_from_run_lengths(const std::vector<int>& runs, int T) {
  std::vector<FrameRange> out;
  int next = 1;
  for (int len : runs) {
    if (len < 1) fail(ErrorKind::Partition, "segment run length must be positive");
    out.push_back({next, next + len - 1});
    next += len;
  }
  if (next != T + 1) fail(ErrorKind::Partition, "segment runs do not cover [1, T]");
  return out;
}

std::vector<double> segment_average_values(const std::vector<double>& values,
                                           const std::vector<FrameRange>& segments) {
  const int T = static_cast<int>(values.size());
  int next = 1;
  for (const FrameRange& seg : segments) {
    if (seg.first != next || seg.last < seg.first || seg.last > T) {
      fail(ErrorKind::Partition, "segments must partition [1, T] contiguously");
    }
    next = seg.last + 1;
  }
  if (next != T + 1) fail(ErrorKind::Partition, "segments must cover [1, T] exactly");

  std::vector<double> out(values.size());
  for (const FrameRange& seg : segments) {
    double sum = 0.0;
    for (int t = seg.first; t <= seg.last; ++t) sum += values[t - 1];
    const double mean = sum / (seg.last - seg.first + 1);
    for (int t = seg.first; t <= seg.last; ++t) out[t - 1] = mean;
  }
  return out;
}

FrameScores segment_average(const FrameScores& scores,
                            const std::vector<FrameRange>& segments) {
  if (scores.h1.size() != scores.g.size() || scores.h2.size() != scores.g.size()) {
    fail(ErrorKind::Shape, "frame scores: h1/g/h2 lengths differ");
  }
  FrameScores out;
  out.h1 = segment_average_values(scores.h1, segments);
  out.g = segment_average_values(scores.g, segments);
  out.h2 = segment_average_values(scores.h2, segments);
  return out;
}

}  // namespace lftc
