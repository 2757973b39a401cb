#include "lftc/manifest.hpp"

#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "lftc/error.hpp"
#include "lftc/io.hpp"

namespace lftc {

namespace {

using nlohmann::json;

std::string require_string(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key) || !j[key].is_string()) {
    fail(ErrorKind::Format, std::string(ctx) + ": missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    fail(ErrorKind::Format, "manifest: " + std::string(ex.what()));
  }

  DatasetManifest m;
  m.base_dir = path.parent_path();
  m.category = require_string(j, "category", "manifest");
  if (m.category.empty()) fail(ErrorKind::Format, "manifest: empty category name");

  if (!j.contains("exemplars") || !j["exemplars"].is_object()) {
    fail(ErrorKind::Format, "manifest: missing exemplars object");
  }
  m.exemplar_features = require_string(j["exemplars"], "features", "manifest exemplars");
  m.exemplar_sidecar = require_string(j["exemplars"], "sidecar", "manifest exemplars");
  for (const auto& rel : {m.exemplar_features, m.exemplar_sidecar}) {
    if (!std::filesystem::exists(m.base_dir / rel)) {
      fail(ErrorKind::Format, "manifest: dangling exemplar reference '" + rel + "'");
    }
  }

  if (!j.contains("videos") || !j["videos"].is_array()) {
    fail(ErrorKind::Format, "manifest: missing videos array");
  }
  std::set<std::string> seen;
  for (const auto& vj : j["videos"]) {
    VideoEntry e;
    e.id = require_string(vj, "id", "manifest video");
    e.features = require_string(vj, "features", "manifest video");
    if (!seen.insert(e.id).second) {
      fail(ErrorKind::Format, "manifest: duplicate video id '" + e.id + "'");
    }
    if (vj.contains("gt")) {
      if (!vj["gt"].is_string()) fail(ErrorKind::Format, "manifest: gt must be a string");
      GroundTruth gt{vj["gt"].get<std::string>()};
      gt.validate();
      e.gt = std::move(gt);
    }
    if (vj.contains("segments")) {
      if (!vj["segments"].is_array()) {
        fail(ErrorKind::Format, "manifest: segments must be an array");
      }
      std::vector<int> runs;
      for (const auto& r : vj["segments"]) {
        if (!r.is_number_integer() || r.get<int>() < 1) {
          fail(ErrorKind::Format, "manifest: segment run lengths must be positive integers");
        }
        runs.push_back(r.get<int>());
      }
      e.segments = std::move(runs);
    }
    m.videos.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  json j;
  j["category"] = m.category;
  j["exemplars"] = {{"features", m.exemplar_features}, {"sidecar", m.exemplar_sidecar}};
  json videos = json::array();
  for (const auto& e : m.videos) {
    json vj;
    vj["id"] = e.id;
    vj["features"] = e.features;
    if (e.gt) vj["gt"] = e.gt->seq;
    if (e.segments) vj["segments"] = *e.segments;
    videos.push_back(std::move(vj));
  }
  j["videos"] = std::move(videos);

  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

LoadedCategory load_category(const DatasetManifest& m) {
  LoadedCategory cat;
  cat.category = m.category;
  cat.exemplars =
      load_exemplars(m.base_dir / m.exemplar_features, m.base_dir / m.exemplar_sidecar);

  for (const auto& e : m.videos) {
    LoadedVideo v;
    v.id = e.id;
    v.features = read_feature_file(m.base_dir / e.features);
    v.features.id = e.id;
    if (v.features.d != cat.exemplars.d) {
      fail(ErrorKind::Shape, "video '" + e.id + "': feature dimension " +
                                 std::to_string(v.features.d) + " != exemplar dimension " +
                                 std::to_string(cat.exemplars.d));
    }
    if (e.gt) {
      if (e.gt->size() != v.features.T) {
        fail(ErrorKind::Shape, "video '" + e.id + "': gt length " +
                                   std::to_string(e.gt->size()) + " != T " +
                                   std::to_string(v.features.T));
      }
      v.gt = e.gt;
    }
    if (e.segments) {
      const int sum = std::accumulate(e.segments->begin(), e.segments->end(), 0);
      if (sum != v.features.T) {
        fail(ErrorKind::Partition, "video '" + e.id + "': segment runs sum to " +
                                       std::to_string(sum) + ", expected T " +
                                       std::to_string(v.features.T));
      }
      v.segments = e.segments;
    }
    cat.videos.push_back(std::move(v));
  }
  return cat;
}

}  // namespace lftc
