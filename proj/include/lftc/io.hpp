#pragma once

#include <filesystem>
#include <vector>

#include "lftc/model.hpp"
#include "lftc/types.hpp"

namespace lftc {

// Feature file layout (all integers little-endian):
//   magic "LFTC" | version u32 (= 1) | T u32 | d u32 | T*d float32, row-major
VideoFeatures read_feature_file(const std::filesystem::path& path);
void write_feature_file(const VideoFeatures& v, const std::filesystem::path& path);

// Checkpoint layout:
//   magic "LFTM" | version u32 (= 1) | d u32 | hidden u32 | float32 tensors in
//   param_tensors order (state w1,b1,w2,b2 then action w1,b1,w2,b2), row-major
void save_checkpoint(const ModelParams& m, const std::filesystem::path& path);
// expected_d = 0 accepts any dimension; otherwise a mismatch is a shape error.
ModelParams load_checkpoint(const std::filesystem::path& path, int expected_d = 0);

// Exemplars reuse the feature-file format (T = |E1| + |E2|) plus a JSON
// sidecar holding the split point.
void save_exemplars(const ExemplarSet& e, const std::filesystem::path& features,
                    const std::filesystem::path& sidecar);
ExemplarSet load_exemplars(const std::filesystem::path& features,
                           const std::filesystem::path& sidecar);

namespace detail {
// Raw layer shared by video features and exemplar storage; accepts any T >= 1.
void write_frames(const std::filesystem::path& path, const float* data, int T, int d);
VideoFeatures read_frames(const std::filesystem::path& path);
}  // namespace detail

}  // namespace lftc
