#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lftc/error.hpp"
#include "lftc/evaluation.hpp"
#include "lftc/inference.hpp"
#include "lftc/io.hpp"
#include "lftc/kernels.hpp"
#include "lftc/manifest.hpp"
#include "lftc/neural.hpp"
#include "lftc/synthgen.hpp"
#include "lftc/training.hpp"
#include "lftc/weighting.hpp"

namespace {

using nlohmann::json;

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) lftc::fail(lftc::ErrorKind::Io, "cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) lftc::fail(lftc::ErrorKind::Io, "cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    lftc::fail(lftc::ErrorKind::Format, path + ": " + ex.what());
  }
  return j;
}

// --category selects/asserts the category a manifest holds.
void check_category(const lftc::DatasetManifest& manifest, const std::string& wanted) {
  if (!wanted.empty() && wanted != manifest.category) {
    lftc::fail(lftc::ErrorKind::Lookup,
               "category '" + wanted + "' not found in manifest (holds '" +
                   manifest.category + "')");
  }
}

// Per-video relevance scores for a whole category.
std::vector<std::pair<std::string, double>> category_relevance(
    const lftc::LoadedCategory& cat, int threads) {
  std::vector<std::pair<std::string, double>> scores;
  scores.reserve(cat.videos.size());
  for (const auto& v : cat.videos) {
    scores.emplace_back(v.id, lftc::relevance_score(v.features, cat.exemplars, threads));
  }
  return scores;
}

lftc::RelevanceReport report_from_json(const json& j) {
  lftc::RelevanceReport report;
  if (!j.contains("theta") || !j.contains("tau") || !j.contains("videos")) {
    lftc::fail(lftc::ErrorKind::Format, "relevance report: missing fields");
  }
  report.theta = j["theta"].get<double>();
  report.tau = j["tau"].get<double>();
  for (const auto& vj : j["videos"]) {
    report.videos.push_back({vj.at("id").get<std::string>(), vj.at("r").get<double>(),
                             vj.at("omega").get<double>()});
  }
  return report;
}

json report_to_json(const lftc::RelevanceReport& report) {
  json j;
  j["theta"] = report.theta;
  j["tau"] = report.tau;
  json videos = json::array();
  for (const auto& v : report.videos) {
    videos.push_back({{"id", v.id}, {"r", v.r}, {"omega", v.omega}});
  }
  j["videos"] = std::move(videos);
  return j;
}

json precision_to_json(const lftc::PrecisionResult& res) {
  json j;
  json cats = json::object();
  for (const auto& [name, cp] : res.per_category) {
    json cj;
    if (cp.state_prec) cj["state_prec"] = *cp.state_prec;
    if (cp.action_prec) cj["action_prec"] = *cp.action_prec;
    cj["n_state"] = cp.n_state;
    cj["n_action"] = cp.n_action;
    cats[name] = std::move(cj);
  }
  j["per_category"] = std::move(cats);
  json macro = json::object();
  if (res.macro_state) macro["state_prec"] = *res.macro_state;
  if (res.macro_action) macro["action_prec"] = *res.macro_action;
  j["macro"] = std::move(macro);
  if (!res.warnings.empty()) j["warnings"] = res.warnings;
  return j;
}

void print_pretty(const lftc::PrecisionResult& res) {
  std::printf("%-24s %10s %10s\n", "category", "st prec", "ac prec");
  for (const auto& [name, cp] : res.per_category) {
    std::printf("%-24s %10s %10s\n", name.c_str(),
                cp.state_prec ? std::to_string(*cp.state_prec).c_str() : "-",
                cp.action_prec ? std::to_string(*cp.action_prec).c_str() : "-");
  }
  std::printf("%-24s %10s %10s\n", "macro",
              res.macro_state ? std::to_string(*res.macro_state).c_str() : "-",
              res.macro_action ? std::to_string(*res.macro_action).c_str() : "-");
}

void write_precision_csv(const lftc::PrecisionResult& res, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) lftc::fail(lftc::ErrorKind::Io, "cannot open for writing: " + path);
  out << "category,state_prec,action_prec\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const auto& [name, cp] : res.per_category) {
    out << name << ',' << cell(cp.state_prec) << ',' << cell(cp.action_prec) << '\n';
  }
  out << "macro," << cell(res.macro_state) << ',' << cell(res.macro_action) << '\n';
}

struct HyperFlags {
  lftc::HyperParams hp;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--delta", hp.delta, "positive window half-width");
    cmd->add_option("--kappa", hp.kappa, "action negative offset");
    cmd->add_option("--lambda", hp.lambda, "action loss weight");
    cmd->add_option("--mu", hp.mu, "action positive weight");
    cmd->add_option("--tau", hp.tau, "relevance weight temperature");
    cmd->add_option("--lr", hp.lr, "learning rate");
    cmd->add_option("--momentum", hp.momentum, "SGD momentum");
    cmd->add_option("--l2", hp.l2, "L2 penalty");
    cmd->add_option("--batch-size", hp.batch_size, "videos per batch");
    cmd->add_option("--epochs", hp.epochs, "training epochs");
    cmd->add_option("--hidden-dim", hp.hidden_dim, "MLP hidden dimension");
    cmd->add_option("--aug-sigma", hp.aug_sigma, "feature noise std (0 disables)");
    cmd->add_option("--seed", hp.seed, "RNG seed");
  }
};

json epoch_to_json(const lftc::EpochStats& s) {
  json e;
  e["epoch"] = s.epoch;
  e["mean_loss"] = s.mean_loss;
  e["labels_computed"] = s.labels_computed;
  if (s.state_prec) e["state_prec"] = *s.state_prec;
  if (s.action_prec) e["action_prec"] = *s.action_prec;
  return e;
}

int run_generate(const lftc::GenConfig& cfg, const std::string& out_dir, int threads) {
  lftc::generate(cfg, out_dir, threads);
  std::cout << "wrote " << cfg.n_videos << " videos to " << out_dir << "\n";
  return 0;
}

int run_relevance(const std::string& manifest_path, const std::string& category,
                  const std::string& out_path, double tau, int threads) {
  const auto manifest = lftc::load_manifest(manifest_path);
  check_category(manifest, category);
  const auto cat = lftc::load_category(manifest);
  const auto scores = category_relevance(cat, threads);
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& [id, r] : scores) values.push_back(r);
  const double theta = lftc::select_theta(values);
  const auto report = lftc::compute_weights(scores, theta, tau);
  write_json(report_to_json(report), out_path);
  std::cout << "theta " << theta << ", " << scores.size() << " videos\n";
  return 0;
}

int run_train(const std::string& manifest_path, const std::string& category,
              const std::string& out_path, const std::string& relevance_path,
              const std::string& log_path, bool no_weighting, bool attend,
              bool select_best, const lftc::HyperParams& hp, int threads) {
  const auto manifest = lftc::load_manifest(manifest_path);
  check_category(manifest, category);
  const auto cat = lftc::load_category(manifest);

  std::map<std::string, double> omega;
  if (no_weighting) {
    for (const auto& v : cat.videos) omega[v.id] = 1.0;
  } else if (!relevance_path.empty()) {
    const auto report = report_from_json(load_json(relevance_path));
    for (const auto& v : report.videos) omega[v.id] = v.omega;
  } else {
    const auto scores = category_relevance(cat, threads);
    std::vector<double> values;
    for (const auto& [id, r] : scores) values.push_back(r);
    const auto report = lftc::compute_weights(scores, lftc::select_theta(values), hp.tau);
    for (const auto& v : report.videos) omega[v.id] = v.omega;
  }

  lftc::TrainOptions opts;
  opts.attend = attend;
  opts.select_best = select_best;
  opts.threads = threads;
  const lftc::TrainResult result = lftc::train_category(cat, hp, omega, opts);

  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::trunc);
    if (!log) lftc::fail(lftc::ErrorKind::Io, "cannot open for writing: " + log_path);
  }
  for (const auto& s : result.epochs) {
    const std::string line = epoch_to_json(s).dump();
    std::cout << line << "\n";
    if (log.is_open()) log << line << "\n";
  }
  lftc::save_checkpoint(select_best ? result.best_params : result.final_params, out_path);
  if (select_best) std::cout << "best epoch " << result.best_epoch << "\n";
  return 0;
}

int run_label(const std::string& manifest_path, const std::string& category,
              const std::string& model_path, const std::string& out_path,
              bool attend, int threads) {
  const auto manifest = lftc::load_manifest(manifest_path);
  check_category(manifest, category);
  const auto cat = lftc::load_category(manifest);
  const lftc::ModelParams m =
      lftc::load_checkpoint(model_path, cat.exemplars.d);

  json records = json::array();
  for (const auto& video : cat.videos) {
    const lftc::LabeledScore ls =
        lftc::label_video(m, video, attend ? &cat.exemplars : nullptr, attend, threads);
    records.push_back({{"video_id", video.id},
                       {"s1", ls.label.s1},
                       {"a", ls.label.a},
                       {"s2", ls.label.s2},
                       {"score", ls.score}});
  }
  write_json(records, out_path);
  return 0;
}

int run_eval(const std::string& manifest_path, const std::string& category,
             const std::string& labels_path, const std::string& out_path,
             const std::string& csv_path, bool pretty) {
  const auto manifest = lftc::load_manifest(manifest_path);
  check_category(manifest, category);
  std::map<std::string, const lftc::VideoEntry*> by_id;
  for (const auto& v : manifest.videos) by_id[v.id] = &v;

  const json labels = load_json(labels_path);
  if (!labels.is_array()) {
    lftc::fail(lftc::ErrorKind::Format, "labels file must be a JSON array");
  }
  std::map<std::string, std::vector<lftc::VideoEval>> grouped;
  std::vector<std::string> warnings;
  for (const auto& rec : labels) {
    const std::string id = rec.at("video_id").get<std::string>();
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      lftc::fail(lftc::ErrorKind::Lookup, "labels reference unknown video '" + id + "'");
    }
    if (!it->second->gt) {
      warnings.push_back("video '" + id + "' has no ground truth; skipped");
      continue;
    }
    const lftc::TemporalLabel label{rec.at("s1").get<int>(), rec.at("a").get<int>(),
                                    rec.at("s2").get<int>()};
    grouped[manifest.category].push_back(
        lftc::evaluate_video(id, label, *it->second->gt));
  }
  if (grouped.empty()) {
    lftc::fail(lftc::ErrorKind::Data, "no evaluable labels (no ground truth?)");
  }
  lftc::PrecisionResult res = lftc::aggregate(grouped);
  res.warnings.insert(res.warnings.end(), warnings.begin(), warnings.end());
  if (!out_path.empty()) write_json(precision_to_json(res), out_path);
  if (!csv_path.empty()) write_precision_csv(res, csv_path);
  if (pretty) {
    print_pretty(res);
  } else if (out_path.empty()) {
    std::cout << precision_to_json(res).dump(2) << "\n";
  }
  return 0;
}

int run_baseline(const std::string& manifest_path, const std::string& category,
                 const std::string& out_path, const std::string& labels_out,
                 int trials, std::int64_t seed) {
  const auto manifest = lftc::load_manifest(manifest_path);
  check_category(manifest, category);
  std::vector<lftc::BaselineVideo> videos;
  for (const auto& v : manifest.videos) {
    if (v.gt) videos.push_back({v.id, manifest.category, *v.gt});
  }
  if (videos.empty()) {
    lftc::fail(lftc::ErrorKind::Data, "baseline: manifest has no annotated videos");
  }

  json draws = json::array();
  std::function<void(const std::string&, int, const lftc::TemporalLabel&)> sink;
  if (!labels_out.empty()) {
    sink = [&draws](const std::string& id, int trial, const lftc::TemporalLabel& l) {
      draws.push_back({{"video_id", id}, {"trial", trial}, {"s1", l.s1}, {"a", l.a},
                       {"s2", l.s2}});
    };
  }
  std::vector<std::string> skipped;
  const lftc::PrecisionResult res = lftc::random_constrained_baseline(
      videos, trials, static_cast<std::uint64_t>(seed), &skipped, sink);
  for (const auto& id : skipped) {
    std::cerr << "warning: video '" << id << "' shorter than 3 seconds, skipped\n";
  }
  write_json(precision_to_json(res), out_path);
  if (!labels_out.empty()) write_json(draws, labels_out);
  return 0;
}

int run_gradcheck(int trials, std::int64_t seed, double step, const std::string& out_path) {
  lftc::GradCheckConfig cfg;
  cfg.trials = trials;
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.step = step;
  const lftc::GradCheckReport report = lftc::run_gradient_check(cfg);
  json j;
  j["pass"] = report.pass;
  j["max_rel_error"] = report.max_rel_error;
  j["max_abs_error"] = report.max_abs_error;
  j["entries_checked"] = report.entries_checked;
  j["failures"] = report.failures;
  if (!out_path.empty()) write_json(j, out_path);
  std::cout << j.dump(2) << "\n";
  if (!report.pass) {
    std::cerr << "gradient check failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-supervised temporal localization of object states and "
               "state-modifying actions over per-second feature sequences"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic corpus");
  lftc::GenConfig gen_cfg;
  std::string gen_out;
  int gen_threads = 1;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--category", gen_cfg.category, "category name");
  gen->add_option("--n-videos", gen_cfg.n_videos, "number of videos");
  gen->add_option("--noise-fraction", gen_cfg.noise_fraction, "fraction of background-only videos");
  gen->add_option("--t-min", gen_cfg.t_min, "minimum video length");
  gen->add_option("--t-max", gen_cfg.t_max, "maximum video length");
  gen->add_option("--dim", gen_cfg.d, "feature dimension");
  gen->add_option("--cluster-sep", gen_cfg.cluster_separation, "minimum centroid distance");
  gen->add_option("--frame-noise", gen_cfg.frame_noise_std, "frame noise std");
  gen->add_option("--exemplars-per-state", gen_cfg.exemplars_per_state, "exemplars per state (1-5)");
  gen->add_option("--prop-initial", gen_cfg.prop_initial, "expected initial-state proportion");
  gen->add_option("--prop-action", gen_cfg.prop_action, "expected action proportion");
  gen->add_option("--prop-end", gen_cfg.prop_end, "expected end-state proportion");
  gen->add_option("--seed", gen_cfg.seed, "RNG seed");
  gen->add_option("--threads", gen_threads, "worker threads");

  // relevance
  auto* rel = app.add_subcommand("relevance", "score video relevance and weights");
  std::string rel_manifest, rel_category, rel_out;
  double rel_tau = lftc::HyperParams{}.tau;
  int rel_threads = 1;
  rel->add_option("--manifest", rel_manifest, "manifest path")->required();
  rel->add_option("--category", rel_category, "category name to select");
  rel->add_option("--out", rel_out, "report output path")->required();
  rel->add_option("--tau", rel_tau, "weight temperature");
  rel->add_option("--threads", rel_threads, "worker threads");

  // train
  auto* train = app.add_subcommand("train", "train state and action classifiers");
  std::string train_manifest, train_category, train_out, train_relevance, train_log;
  bool no_weighting = false, train_attend = false, select_best = false;
  int train_threads = 1;
  HyperFlags train_hp;
  train->add_option("--manifest", train_manifest, "manifest path")->required();
  train->add_option("--category", train_category, "category name to select");
  train->add_option("--out", train_out, "checkpoint output path")->required();
  train->add_option("--relevance", train_relevance, "relevance report path");
  train->add_option("--log", train_log, "per-epoch JSONL log path");
  train->add_flag("--no-weighting", no_weighting, "force omega == 1 everywhere");
  train->add_flag("--attend", train_attend, "similarity-attended labeling");
  train->add_flag("--select-best", select_best, "write the best-validation epoch");
  train->add_option("--threads", train_threads, "worker threads");
  train_hp.add_to(train);

  // label
  auto* label = app.add_subcommand("label", "label videos with a trained model");
  std::string label_manifest, label_category, label_model, label_out;
  bool label_attend = false;
  int label_threads = 1;
  label->add_option("--manifest", label_manifest, "manifest path")->required();
  label->add_option("--category", label_category, "category name to select");
  label->add_option("--model", label_model, "checkpoint path")->required();
  label->add_option("--out", label_out, "labels output path")->required();
  label->add_flag("--attend", label_attend, "similarity-attended labeling");
  label->add_option("--threads", label_threads, "worker threads");

  // eval
  auto* eval = app.add_subcommand("eval", "precision of labels against ground truth");
  std::string eval_manifest, eval_category, eval_labels, eval_out, eval_csv;
  bool pretty = false;
  eval->add_option("--manifest", eval_manifest, "manifest path")->required();
  eval->add_option("--category", eval_category, "category name to select");
  eval->add_option("--labels", eval_labels, "labels file")->required();
  eval->add_option("--out", eval_out, "result output path");
  eval->add_option("--csv", eval_csv, "also write a CSV table");
  eval->add_flag("--pretty", pretty, "print a table instead of JSON");

  // baseline
  auto* base = app.add_subcommand("baseline", "random labeling under the ordering constraint");
  std::string base_manifest, base_category, base_out, base_labels_out;
  int base_trials = 1000;
  std::int64_t base_seed = 0;
  base->add_option("--manifest", base_manifest, "manifest path")->required();
  base->add_option("--category", base_category, "category name to select");
  base->add_option("--out", base_out, "result output path")->required();
  base->add_option("--labels-out", base_labels_out, "per-trial label dump path");
  base->add_option("--trials", base_trials, "draws per video");
  base->add_option("--seed", base_seed, "RNG seed");

  // gradcheck
  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient check");
  int grad_trials = 20;
  std::int64_t grad_seed = static_cast<std::int64_t>(lftc::GradCheckConfig{}.seed);
  double grad_step = 1e-5;
  std::string grad_out;
  grad->add_option("--trials", grad_trials, "random (params, batch) draws");
  grad->add_option("--seed", grad_seed, "RNG seed");
  grad->add_option("--step", grad_step, "finite-difference step");
  grad->add_option("--out", grad_out, "report output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (gen->parsed()) return run_generate(gen_cfg, gen_out, gen_threads);
    if (rel->parsed()) {
      return run_relevance(rel_manifest, rel_category, rel_out, rel_tau, rel_threads);
    }
    if (train->parsed()) {
      return run_train(train_manifest, train_category, train_out, train_relevance,
                       train_log, no_weighting, train_attend, select_best,
                       train_hp.hp, train_threads);
    }
    if (label->parsed()) {
      return run_label(label_manifest, label_category, label_model, label_out,
                       label_attend, label_threads);
    }
    if (eval->parsed()) {
      return run_eval(eval_manifest, eval_category, eval_labels, eval_out, eval_csv,
                      pretty);
    }
    if (base->parsed()) {
      return run_baseline(base_manifest, base_category, base_out, base_labels_out,
                          base_trials, base_seed);
    }
    if (grad->parsed()) return run_gradcheck(grad_trials, grad_seed, grad_step, grad_out);
  } catch (const lftc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
