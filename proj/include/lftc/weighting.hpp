#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lftc {

struct RelevanceEntry {
  std::string id;
  double r = 0.0;      // relevance score r_v
  double omega = 0.0;  // loss weight, sigmoid((r - theta) / tau)
};

struct RelevanceReport {
  double theta = 0.0;
  double tau = 0.0;
  std::vector<RelevanceEntry> videos;
};

// Threshold minimizing var{r : r < theta} + var{r : r > theta} over midpoints
// of consecutive distinct sorted scores (population variance, a class of at
// most one element contributes 0). Candidate ties resolve to the smallest
// theta; if every score is equal, theta is that common value.
double select_theta(const std::vector<double>& scores);

RelevanceReport compute_weights(
    const std::vector<std::pair<std::string, double>>& scores, double theta,
    double tau);

struct RetrievalDiagnostic {
  double frac_relevant_above = 0.0;  // relevant videos with r > theta
  double frac_all_above = 0.0;       // all videos with r > theta
};

RetrievalDiagnostic retrieval_diagnostic(const RelevanceReport& report,
                                         const std::set<std::string>& relevant_ids);

// Branch form; never overflows, result clamped inside (0, 1).
double stable_sigmoid(double x);

}  // namespace lftc
