#include "lftc/training.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lftc/error.hpp"
#include "lftc/evaluation.hpp"
#include "lftc/kernels.hpp"
#include "lftc/neural.hpp"
#include "lftc/rng.hpp"

namespace lftc {

namespace {

constexpr std::uint64_t kShuffleSalt = 1;
constexpr std::uint64_t kAugmentSalt = 2;

}  // namespace

std::vector<int> sample_positives(int center, int delta, int T) {
  if (center < 1 || center > T) {
    fail(ErrorKind::Contract, "sample_positives: center out of [1, T]");
  }
  if (delta < 0) fail(ErrorKind::Contract, "sample_positives: delta must be >= 0");
  std::vector<int> out;
  for (int t = std::max(1, center - delta); t <= std::min(T, center + delta); ++t) {
    out.push_back(t);
  }
  return out;
}

std::vector<int> sample_action_negatives(const std::vector<int>& act_pos, int kappa,
                                         int T) {
  if (act_pos.empty()) {
    fail(ErrorKind::Contract, "sample_action_negatives: empty positive set");
  }
  std::set<int> pos(act_pos.begin(), act_pos.end());
  if (*pos.begin() < 1 || *pos.rbegin() > T) {
    fail(ErrorKind::Contract, "sample_action_negatives: positives outside [1, T]");
  }
  std::set<int> neg;
  for (int t : act_pos) {
    neg.insert(std::clamp(t - kappa, 1, T));
    neg.insert(std::clamp(t + kappa, 1, T));
  }
  std::vector<int> out;
  for (int t : neg) {
    if (!pos.count(t)) out.push_back(t);  // never both positive and negative
  }
  return out;
}

SampledSets build_sampled_sets(const TemporalLabel& label, int delta, int kappa,
                               int T) {
  label.validate(T);
  SampledSets sets;
  sets.s1_pos = sample_positives(label.s1, delta, T);
  sets.s2_pos = sample_positives(label.s2, delta, T);
  sets.act_pos = sample_positives(label.a, delta, T);
  sets.act_neg = sample_action_negatives(sets.act_pos, kappa, T);
  return sets;
}

VideoLoss video_loss(const ModelParams& m, const VideoFeatures& v,
                     const TemporalLabel& label, double omega,
                     const HyperParams& hp, const std::vector<float>* frame_noise) {
  if (omega < 0) fail(ErrorKind::Contract, "video_loss: omega must be >= 0");
  if (frame_noise && static_cast<int>(frame_noise->size()) != v.d) {
    fail(ErrorKind::Shape, "video_loss: noise vector length != d");
  }
  const SampledSets sets = build_sampled_sets(label, hp.delta, hp.kappa, v.T);
  const std::size_t n_items = sets.s1_pos.size() + sets.s2_pos.size() +
                              sets.act_pos.size() + sets.act_neg.size();

  // Sampled frames, optionally shifted by the per-video noise draw.
  std::vector<std::vector<float>> noised;
  noised.reserve(n_items);
  auto frame_span = [&](int t) -> std::span<const float> {
    if (!frame_noise) return {v.frame(t), static_cast<std::size_t>(v.d)};
    std::vector<float> x(v.frame(t), v.frame(t) + v.d);
    for (int k = 0; k < v.d; ++k) x[k] += (*frame_noise)[k];
    noised.push_back(std::move(x));
    return {noised.back().data(), noised.back().size()};
  };

  std::vector<LossItem<float>> items;
  items.reserve(n_items);
  for (int t : sets.s1_pos) items.push_back({frame_span(t), Role::State1, omega});
  for (int t : sets.s2_pos) items.push_back({frame_span(t), Role::State2, omega});
  for (int t : sets.act_pos) {
    items.push_back({frame_span(t), Role::ActionPos, omega * hp.lambda * hp.mu});
  }
  for (int t : sets.act_neg) {
    items.push_back({frame_span(t), Role::ActionNeg, omega * hp.lambda});
  }

  BackwardResult<float> r = backward<float>(m, items);
  return {r.loss, std::move(r.grad)};
}

LabeledScore label_video(const ModelParams& m, const LoadedVideo& video,
                         const ExemplarSet* exemplars, bool attend, int threads) {
  FrameScores scores = score_frames(m, video.features, threads);
  if (attend && exemplars == nullptr) {
    fail(ErrorKind::Contract, "label_video: attend requires exemplars");
  }
  SimilarityProfiles sims;
  if (attend) sims = exemplar_similarity(video.features, *exemplars, threads);

  if (video.segments) {
    const auto ranges = ranges_from_run_lengths(*video.segments, video.features.T);
    scores = segment_average(scores, ranges);
    if (attend) {
      sims.initial = segment_average_values(sims.initial, ranges);
      sims.end = segment_average_values(sims.end, ranges);
    }
  }
  return attend ? label_argmax_attended(scores, sims.initial, sims.end)
                : label_argmax(scores);
}

namespace {

struct SlotResult {
  double loss = 0.0;
  GradientRecord grad;
};

// Per-epoch precision over the annotated videos with the current classifiers.
std::pair<std::optional<double>, std::optional<double>> epoch_precision(
    const LoadedCategory& cat, const ModelParams& m,
    const std::vector<SimilarityProfiles>* attend_sims, bool attend, int threads) {
  std::vector<int> with_gt;
  for (int i = 0; i < static_cast<int>(cat.videos.size()); ++i) {
    if (cat.videos[i].gt) with_gt.push_back(i);
  }
  if (with_gt.empty()) return {std::nullopt, std::nullopt};

  std::vector<VideoEval> evals(with_gt.size());
  std::exception_ptr eptr = nullptr;
#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(static)
#endif
  for (int k = 0; k < static_cast<int>(with_gt.size()); ++k) {
    try {
      const LoadedVideo& video = cat.videos[with_gt[k]];
      FrameScores scores = score_frames_serial(m, video.features);
      SimilarityProfiles sims;
      if (attend) sims = (*attend_sims)[with_gt[k]];
      if (video.segments) {
        const auto ranges =
            ranges_from_run_lengths(*video.segments, video.features.T);
        scores = segment_average(scores, ranges);
        if (attend) {
          sims.initial = segment_average_values(sims.initial, ranges);
          sims.end = segment_average_values(sims.end, ranges);
        }
      }
      const LabeledScore ls = attend
                                  ? label_argmax_attended(scores, sims.initial, sims.end)
                                  : label_argmax(scores);
      evals[k] = evaluate_video(video.id, ls.label, *video.gt);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!eptr) eptr = std::current_exception();
    }
  }
  if (eptr) std::rethrow_exception(eptr);

  std::map<std::string, std::vector<VideoEval>> grouped;
  grouped[cat.category] = std::move(evals);
  const PrecisionResult res = aggregate(grouped);
  return {res.macro_state, res.macro_action};
}

}  // namespace

TrainResult train_category(const LoadedCategory& cat, const HyperParams& hp,
                           const std::map<std::string, double>& omega_by_id,
                           const TrainOptions& opts) {
  hp.validate();
  if (cat.videos.empty()) fail(ErrorKind::Data, "train: no videos in category");
  const int d = cat.videos.front().features.d;
  std::vector<double> omegas(cat.videos.size());
  for (std::size_t i = 0; i < cat.videos.size(); ++i) {
    const LoadedVideo& v = cat.videos[i];
    v.features.validate();
    if (v.features.d != d) fail(ErrorKind::Shape, "train: inconsistent feature dims");
    auto it = omega_by_id.find(v.id);
    if (it == omega_by_id.end()) {
      fail(ErrorKind::Lookup, "train: no weight for video '" + v.id + "'");
    }
    omegas[i] = it->second;
  }

  // Attention similarities depend only on fixed features; compute once.
  std::vector<SimilarityProfiles> attend_sims;
  if (opts.attend) {
    attend_sims.resize(cat.videos.size());
    for (std::size_t i = 0; i < cat.videos.size(); ++i) {
      attend_sims[i] =
          exemplar_similarity(cat.videos[i].features, cat.exemplars, opts.threads);
    }
  }

  ModelParams m = init_params<float>(d, hp.hidden_dim, static_cast<std::uint64_t>(hp.seed));
  OptimizerState opt = make_optimizer(m, hp.lr, hp.momentum, hp.l2);
  Rng shuffle_rng(derive_seed(static_cast<std::uint64_t>(hp.seed), kShuffleSalt));
  Rng aug_rng(derive_seed(static_cast<std::uint64_t>(hp.seed), kAugmentSalt));

  const int n = static_cast<int>(cat.videos.size());
  const int threads = std::max(1, opts.threads);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  double best_score = -1.0;

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    long long labels_computed = 0;

    for (int start = 0; start < n; start += hp.batch_size) {
      const int batch_n = std::min(hp.batch_size, n - start);

      // Augmentation draws happen on one stream before the parallel section,
      // in slot order, so thread count cannot change them.
      std::vector<std::vector<float>> noise(batch_n);
      if (hp.aug_sigma > 0.0) {
        for (int k = 0; k < batch_n; ++k) {
          noise[k].resize(d);
          for (float& x : noise[k]) {
            x = static_cast<float>(aug_rng.normal() * hp.aug_sigma);
          }
        }
      }

      std::vector<SlotResult> slots(batch_n);
      std::exception_ptr eptr = nullptr;
#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(static)
#endif
      for (int k = 0; k < batch_n; ++k) {
        try {
          const int vi = order[start + k];
          const LoadedVideo& video = cat.videos[vi];
          // Labels are recomputed with the current classifiers every time a
          // video enters a batch.
          const FrameScores scores = score_frames_serial(m, video.features);
          const LabeledScore ls =
              opts.attend ? label_argmax_attended(scores, attend_sims[vi].initial,
                                                  attend_sims[vi].end)
                          : label_argmax(scores);
          VideoLoss vl = video_loss(m, video.features, ls.label, omegas[vi], hp,
                                    hp.aug_sigma > 0.0 ? &noise[k] : nullptr);
          slots[k].loss = vl.loss;
          slots[k].grad = std::move(vl.grad);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
          if (!eptr) eptr = std::current_exception();
        }
      }
      if (eptr) std::rethrow_exception(eptr);

      // Deterministic reduction: slot order, then one step on the mean.
      GradientRecord mean;
      mean.resize(d, hp.hidden_dim);
      auto mean_tensors = param_tensors(mean);
      for (int k = 0; k < batch_n; ++k) {
        epoch_loss += slots[k].loss;
        auto slot_tensors = param_tensors(slots[k].grad);
        for (std::size_t ti = 0; ti < mean_tensors.size(); ++ti) {
          auto& dst = *mean_tensors[ti];
          const auto& src = *slot_tensors[ti];
          for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        }
      }
      for (auto* tensor : mean_tensors) {
        for (double& x : *tensor) x /= batch_n;
      }
      sgd_step(m, mean, opt);
      labels_computed += batch_n;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = epoch_loss / n;
    stats.labels_computed = labels_computed;
    if (opts.track_precision || opts.select_best) {
      auto [sp, ap] = epoch_precision(cat, m, opts.attend ? &attend_sims : nullptr,
                                      opts.attend, threads);
      stats.state_prec = sp;
      stats.action_prec = ap;
      if (opts.select_best && (sp || ap)) {
        double score = 0.0;
        int terms = 0;
        if (sp) {
          score += *sp;
          ++terms;
        }
        if (ap) {
          score += *ap;
          ++terms;
        }
        score /= terms;
        if (score > best_score) {
          best_score = score;
          result.best_params = m;
          result.best_epoch = epoch;
        }
      }
    }
    result.epochs.push_back(stats);
  }

  result.final_params = m;
  if (!opts.select_best || result.best_epoch == 0) {
    result.best_params = result.final_params;
    result.best_epoch = hp.epochs;
  }
  return result;
}

}  // namespace lftc
