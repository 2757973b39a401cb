#include "lftc/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lftc/error.hpp"

namespace lftc {

double stable_sigmoid(double x) {
  double s;
  if (x >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  // Keep the result strictly inside (0, 1) even past exp underflow.
  s = std::max(s, std::numeric_limits<double>::min());
  s = std::min(s, 1.0 - std::numeric_limits<double>::epsilon() / 2);
  return s;
}

double select_theta(const std::vector<double>& scores) {
  if (scores.size() < 2) {
    fail(ErrorKind::InsufficientData, "select_theta: at least 2 scores required");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) fail(ErrorKind::Data, "select_theta: non-finite score");
  }

  std::vector<double> sorted(scores);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  if (sorted.front() == sorted.back()) return sorted.front();  // degenerate rule

  // Prefix sums for O(1) population variance of any sorted range.
  std::vector<double> sum(n + 1, 0.0), sumsq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i + 1] = sum[i] + sorted[i];
    sumsq[i + 1] = sumsq[i] + sorted[i] * sorted[i];
  }
  auto var_range = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
    const std::size_t k = hi - lo;
    if (k <= 1) return 0.0;
    const double s = sum[hi] - sum[lo];
    const double sq = sumsq[hi] - sumsq[lo];
    return std::max(0.0, sq / k - (s / k) * (s / k));
  };

  double best_theta = 0.0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (sorted[i] == sorted[i + 1]) continue;
    const double theta = 0.5 * (sorted[i] + sorted[i + 1]);
    // Strict classes; a score that lands exactly on theta joins neither.
    const std::size_t below =
        std::lower_bound(sorted.begin(), sorted.end(), theta) - sorted.begin();
    const std::size_t above_start =
        std::upper_bound(sorted.begin(), sorted.end(), theta) - sorted.begin();
    const double obj = var_range(0, below) + var_range(above_start, n);
    if (obj < best_obj) {  // ties keep the smallest theta (ascending scan)
      best_obj = obj;
      best_theta = theta;
    }
  }
  return best_theta;
}

RelevanceReport compute_weights(
    const std::vector<std::pair<std::string, double>>& scores, double theta,
    double tau) {
  if (tau <= 0.0) fail(ErrorKind::Parameter, "compute_weights: tau must be > 0");
  if (!std::isfinite(theta)) fail(ErrorKind::Data, "compute_weights: non-finite theta");
  RelevanceReport report;
  report.theta = theta;
  report.tau = tau;
  report.videos.reserve(scores.size());
  for (const auto& [id, r] : scores) {
    if (!std::isfinite(r)) fail(ErrorKind::Data, "compute_weights: non-finite score");
    report.videos.push_back({id, r, stable_sigmoid((r - theta) / tau)});
  }
  return report;
}

RetrievalDiagnostic retrieval_diagnostic(const RelevanceReport& report,
                                         const std::set<std::string>& relevant_ids) {
  if (relevant_ids.empty()) {
    fail(ErrorKind::Contract, "retrieval_diagnostic: relevant set is empty");
  }
  if (report.videos.empty()) {
    fail(ErrorKind::Contract, "retrieval_diagnostic: empty report");
  }
  std::set<std::string> known;
  for (const auto& v : report.videos) known.insert(v.id);
  for (const auto& id : relevant_ids) {
    if (!known.count(id)) {
      fail(ErrorKind::Lookup, "retrieval_diagnostic: unknown id '" + id + "'");
    }
  }
  int above_all = 0, above_rel = 0;
  for (const auto& v : report.videos) {
    if (v.r > report.theta) {
      ++above_all;
      if (relevant_ids.count(v.id)) ++above_rel;
    }
  }
  return {static_cast<double>(above_rel) / relevant_ids.size(),
          static_cast<double>(above_all) / report.videos.size()};
}

}  // namespace lftc
