#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lftc/io.hpp"
#include "lftc/neural.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kCli = LFTC_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = std::string(kCli) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lftc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

// Small corpus + common flags used across the pipeline cases.
const std::string kGenFlags =
    " --n-videos 6 --t-min 15 --t-max 25 --dim 6 --cluster-sep 5 "
    "--frame-noise 0.3 --seed 9";
const std::string kTrainFlags =
    " --hidden-dim 16 --epochs 2 --batch-size 4 --kappa 10";

}  // namespace

TEST_CASE("generate is byte-identical across reruns") {
  const fs::path a = fresh_dir("gen_a");
  const fs::path b = fresh_dir("gen_b");
  REQUIRE(run("generate --out " + q(a) + kGenFlags) == 0);
  REQUIRE(run("generate --out " + q(b) + kGenFlags) == 0);
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    REQUIRE(fs::exists(b / rel));
    REQUIRE(slurp(entry.path()) == slurp(b / rel));
    ++compared;
  }
  CHECK(compared >= 8);  // manifest, report, exemplars x2, 6 videos
}

TEST_CASE("full pipeline: relevance, train, label, eval, baseline") {
  const fs::path dir = fresh_dir("pipeline");
  REQUIRE(run("generate --out " + q(dir) + kGenFlags) == 0);
  const std::string manifest = q(dir / "manifest.json");

  REQUIRE(run("relevance --manifest " + manifest + " --out " + q(dir / "rel.json")) == 0);
  const json rel = load_json(dir / "rel.json");
  REQUIRE(rel.contains("theta"));
  REQUIRE(rel["videos"].size() == 6);
  for (const auto& v : rel["videos"]) {
    REQUIRE(v["omega"].get<double>() > 0.0);
    REQUIRE(v["omega"].get<double>() < 1.0);
  }

  REQUIRE(run("train --manifest " + manifest + " --out " + q(dir / "model.lftm") +
              " --relevance " + q(dir / "rel.json") + " --log " +
              q(dir / "log.jsonl") + kTrainFlags) == 0);
  REQUIRE(fs::exists(dir / "model.lftm"));
  {
    std::ifstream log(dir / "log.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(log, line)) {
      const json e = json::parse(line);
      REQUIRE(e.contains("epoch"));
      REQUIRE(e.contains("mean_loss"));
      REQUIRE(e["labels_computed"] == 6);
      ++lines;
    }
    REQUIRE(lines == 2);
  }

  REQUIRE(run("label --manifest " + manifest + " --model " + q(dir / "model.lftm") +
              " --out " + q(dir / "labels.json")) == 0);
  const json labels = load_json(dir / "labels.json");
  REQUIRE(labels.size() == 6);
  for (const auto& rec : labels) {
    REQUIRE(rec["s1"].get<int>() < rec["a"].get<int>());
    REQUIRE(rec["a"].get<int>() < rec["s2"].get<int>());
  }

  REQUIRE(run("eval --manifest " + manifest + " --labels " + q(dir / "labels.json") +
              " --out " + q(dir / "eval.json")) == 0);
  const json eval = load_json(dir / "eval.json");
  REQUIRE(eval["macro"].contains("state_prec"));
  REQUIRE(eval["macro"].contains("action_prec"));

  REQUIRE(run("baseline --manifest " + manifest + " --out " + q(dir / "base.json") +
              " --trials 200 --seed 3") == 0);
  const json base = load_json(dir / "base.json");
  REQUIRE(base["macro"]["action_prec"].get<double>() >= 0.0);
  REQUIRE(base["macro"]["action_prec"].get<double>() <= 1.0);
}

TEST_CASE("train --lr 0 writes exactly the initialization") {
  const fs::path dir = fresh_dir("lr0");
  REQUIRE(run("generate --out " + q(dir) + kGenFlags) == 0);
  REQUIRE(run("train --manifest " + q(dir / "manifest.json") + " --out " +
              q(dir / "model.lftm") + kTrainFlags +
              " --no-weighting --lr 0 --seed 5") == 0);
  const lftc::ModelParams trained = lftc::load_checkpoint(dir / "model.lftm");
  const lftc::ModelParams init = lftc::init_params<float>(6, 16, 5);
  CHECK(trained.state.w1 == init.state.w1);
  CHECK(trained.state.w2 == init.state.w2);
  CHECK(trained.action.w1 == init.action.w1);
  CHECK(trained.action.w2 == init.action.w2);
}

TEST_CASE("single-threaded training is bit-reproducible and matches threaded") {
  const fs::path dir = fresh_dir("det");
  REQUIRE(run("generate --out " + q(dir) + kGenFlags) == 0);
  const std::string train_cmd = "train --manifest " + q(dir / "manifest.json") +
                                kTrainFlags + " --no-weighting --seed 11 --out ";
  REQUIRE(run(train_cmd + q(dir / "m1.lftm") + " --threads 1") == 0);
  REQUIRE(run(train_cmd + q(dir / "m2.lftm") + " --threads 1") == 0);
  REQUIRE(run(train_cmd + q(dir / "m4.lftm") + " --threads 4") == 0);
  CHECK(slurp(dir / "m1.lftm") == slurp(dir / "m2.lftm"));
  CHECK(slurp(dir / "m1.lftm") == slurp(dir / "m4.lftm"));
}

TEST_CASE("--no-weighting equals an explicit all-ones relevance report") {
  const fs::path dir = fresh_dir("noweight");
  REQUIRE(run("generate --out " + q(dir) + kGenFlags) == 0);

  json report;
  report["theta"] = 0.0;
  report["tau"] = 0.001;
  report["videos"] = json::array();
  for (int i = 1; i <= 6; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "v%05d", i);
    report["videos"].push_back({{"id", id}, {"r", 1.0}, {"omega", 1.0}});
  }
  {
    std::ofstream out(dir / "ones.json");
    out << report.dump();
  }
  const std::string base_cmd = "train --manifest " + q(dir / "manifest.json") +
                               kTrainFlags + " --seed 7 --out ";
  REQUIRE(run(base_cmd + q(dir / "nw.lftm") + " --no-weighting") == 0);
  REQUIRE(run(base_cmd + q(dir / "ones.lftm") + " --relevance " + q(dir / "ones.json")) == 0);
  CHECK(slurp(dir / "nw.lftm") == slurp(dir / "ones.lftm"));
}

TEST_CASE("baseline per-trial labels re-evaluate to the same result") {
  const fs::path dir = fresh_dir("basecons");
  REQUIRE(run("generate --out " + q(dir) + kGenFlags) == 0);
  REQUIRE(run("baseline --manifest " + q(dir / "manifest.json") + " --out " +
              q(dir / "base.json") + " --labels-out " + q(dir / "draws.json") +
              " --trials 25 --seed 13") == 0);
  REQUIRE(run("eval --manifest " + q(dir / "manifest.json") + " --labels " +
              q(dir / "draws.json") + " --out " + q(dir / "eval.json")) == 0);
  const json base = load_json(dir / "base.json");
  const json eval = load_json(dir / "eval.json");
  // Mean over (video, trial) rows equals mean over videos of per-video trial
  // means because every video receives the same number of trials.
  CHECK(base["macro"]["action_prec"].get<double>() ==
        doctest::Approx(eval["macro"]["action_prec"].get<double>()).epsilon(1e-12));
  CHECK(base["macro"]["state_prec"].get<double>() ==
        doctest::Approx(eval["macro"]["state_prec"].get<double>()).epsilon(1e-12));
}

TEST_CASE("gradcheck subcommand passes") {
  const fs::path dir = fresh_dir("gradcheck");
  REQUIRE(run("gradcheck --trials 5 --out " + q(dir / "gc.json")) == 0);
  const json gc = load_json(dir / "gc.json");
  CHECK(gc["pass"].get<bool>());
}

TEST_CASE("exit codes distinguish usage errors from data errors") {
  CHECK(run("definitely-not-a-subcommand") == 1);
  CHECK(run("train --manifest x.json") == 1);       // missing required --out
  CHECK(run("train --bogus-flag 1") == 1);          // unknown flag
  CHECK(run("relevance --manifest /nonexistent/m.json --out /tmp/r.json") == 2);

  const fs::path dir = fresh_dir("exitcodes");
  std::ofstream bad(dir / "bad.lftc", std::ios::binary);
  bad << "XXXXnotaheader";
  bad.close();
  std::ofstream manifest(dir / "manifest.json");
  manifest << R"({"category": "c",
                  "exemplars": {"features": "bad.lftc", "sidecar": "bad.lftc"},
                  "videos": [{"id": "a", "features": "bad.lftc"}]})";
  manifest.close();
  CHECK(run("relevance --manifest " + q(dir / "manifest.json") + " --out " +
            q(dir / "r.json")) == 2);
}

TEST_CASE("--category selects and mismatches are rejected") {
  const fs::path dir = fresh_dir("category");
  REQUIRE(run("generate --out " + q(dir) + " --category apple" + kGenFlags) == 0);
  REQUIRE(run("relevance --manifest " + q(dir / "manifest.json") +
              " --category apple --out " + q(dir / "rel.json")) == 0);
  CHECK(run("relevance --manifest " + q(dir / "manifest.json") +
            " --category pear --out " + q(dir / "rel2.json")) == 2);
}

TEST_CASE("eval writes an optional CSV table") {
  const fs::path dir = fresh_dir("csv");
  REQUIRE(run("generate --out " + q(dir) + kGenFlags) == 0);
  REQUIRE(run("baseline --manifest " + q(dir / "manifest.json") + " --out " +
              q(dir / "base.json") + " --labels-out " + q(dir / "draws.json") +
              " --trials 3 --seed 1") == 0);
  REQUIRE(run("eval --manifest " + q(dir / "manifest.json") + " --labels " +
              q(dir / "draws.json") + " --out " + q(dir / "eval.json") + " --csv " +
              q(dir / "eval.csv")) == 0);
  const auto csv = slurp(dir / "eval.csv");
  const std::string text(csv.begin(), csv.end());
  CHECK(text.find("category,state_prec,action_prec") == 0);
  CHECK(text.find("macro,") != std::string::npos);
}

TEST_CASE("attended labeling runs end to end") {
  const fs::path dir = fresh_dir("attend");
  REQUIRE(run("generate --out " + q(dir) + kGenFlags) == 0);
  REQUIRE(run("train --manifest " + q(dir / "manifest.json") + " --out " +
              q(dir / "model.lftm") + kTrainFlags + " --no-weighting --attend") == 0);
  REQUIRE(run("label --manifest " + q(dir / "manifest.json") + " --model " +
              q(dir / "model.lftm") + " --out " + q(dir / "labels.json") +
              " --attend") == 0);
  const json labels = load_json(dir / "labels.json");
  REQUIRE(labels.size() == 6);
}
