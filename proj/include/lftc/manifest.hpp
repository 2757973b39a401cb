#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lftc/types.hpp"

namespace lftc {

struct VideoEntry {
  std::string id;
  std::string features;                      // path, relative to the manifest
  std::optional<GroundTruth> gt;             // per-second labels
  std::optional<std::vector<int>> segments;  // tracklet run lengths, sum == T
};

// One category: its videos and the exemplar files used for noise weighting.
struct DatasetManifest {
  std::string category;
  std::string exemplar_features;  // path, relative to the manifest
  std::string exemplar_sidecar;
  std::vector<VideoEntry> videos;
  std::filesystem::path base_dir;  // set on load; paths resolve against it
};

// Parses and validates: unique video ids, label alphabet, existing exemplar
// files (a dangling reference is rejected at load time).
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);

struct LoadedVideo {
  std::string id;
  VideoFeatures features;
  std::optional<GroundTruth> gt;
  std::optional<std::vector<int>> segments;
};

struct LoadedCategory {
  std::string category;
  ExemplarSet exemplars;
  std::vector<LoadedVideo> videos;
};

// Pulls every referenced file into memory and cross-checks shapes
// (gt length == T, exemplar dimension == feature dimension).
LoadedCategory load_category(const DatasetManifest& m);

}  // namespace lftc
