#include "lftc/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "lftc/error.hpp"

namespace lftc {

namespace {

constexpr char kFeatureMagic[4] = {'L', 'F', 'T', 'C'};
constexpr char kModelMagic[4] = {'L', 'F', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff),
  };
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

bool get_u32(std::ifstream& in, std::uint32_t& v) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) return false;
  v = static_cast<std::uint32_t>(bytes[0]) |
      (static_cast<std::uint32_t>(bytes[1]) << 8) |
      (static_cast<std::uint32_t>(bytes[2]) << 16) |
      (static_cast<std::uint32_t>(bytes[3]) << 24);
  return true;
}

void put_f32(std::ofstream& out, const float* data, std::size_t n) {
  static_assert(sizeof(float) == 4);
  // Host is little-endian in every supported build; byte order asserted below.
  static_assert(std::endian::native == std::endian::little,
                "big-endian hosts need byte swapping here");
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 4));
}

bool get_f32(std::ifstream& in, float* data, std::size_t n) {
  static_assert(std::endian::native == std::endian::little);
  return static_cast<bool>(
      in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * 4)));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open for reading: " + path.string());
  return in;
}

void check_magic(std::ifstream& in, const char expected[4],
                 const std::filesystem::path& path) {
  char magic[4];
  if (!in.read(magic, 4)) fail(ErrorKind::Length, "truncated header: " + path.string());
  if (std::memcmp(magic, expected, 4) != 0) {
    fail(ErrorKind::Format, "bad magic bytes: " + path.string());
  }
  std::uint32_t version = 0;
  if (!get_u32(in, version)) fail(ErrorKind::Length, "truncated header: " + path.string());
  if (version != kVersion) {
    fail(ErrorKind::Format, "unsupported version " + std::to_string(version));
  }
}

void check_eof(std::ifstream& in, const std::filesystem::path& path) {
  char extra;
  if (in.read(&extra, 1)) {
    fail(ErrorKind::Length, "trailing bytes after payload: " + path.string());
  }
}

}  // namespace

namespace detail {

void write_frames(const std::filesystem::path& path, const float* data, int T, int d) {
  if (T < 1 || d < 1) fail(ErrorKind::Validation, "write_frames: empty payload");
  auto out = open_out(path);
  out.write(kFeatureMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(T));
  put_u32(out, static_cast<std::uint32_t>(d));
  put_f32(out, data, static_cast<std::size_t>(T) * d);
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

VideoFeatures read_frames(const std::filesystem::path& path) {
  auto in = open_in(path);
  check_magic(in, kFeatureMagic, path);
  std::uint32_t T = 0, d = 0;
  if (!get_u32(in, T) || !get_u32(in, d)) {
    fail(ErrorKind::Length, "truncated header: " + path.string());
  }
  if (T == 0 || d == 0) fail(ErrorKind::Format, "zero dimension in header: " + path.string());
  VideoFeatures v;
  v.T = static_cast<int>(T);
  v.d = static_cast<int>(d);
  v.data.resize(static_cast<std::size_t>(T) * d);
  if (!get_f32(in, v.data.data(), v.data.size())) {
    fail(ErrorKind::Length, "truncated payload: " + path.string());
  }
  check_eof(in, path);
  for (float f : v.data) {
    if (!std::isfinite(f)) fail(ErrorKind::Data, "non-finite feature: " + path.string());
  }
  return v;
}

}  // namespace detail

VideoFeatures read_feature_file(const std::filesystem::path& path) {
  VideoFeatures v = detail::read_frames(path);
  v.id = path.stem().string();
  return v;
}

void write_feature_file(const VideoFeatures& v, const std::filesystem::path& path) {
  v.validate();
  detail::write_frames(path, v.data.data(), v.T, v.d);
}

void save_checkpoint(const ModelParams& m, const std::filesystem::path& path) {
  if (m.d < 1 || m.hidden < 1) fail(ErrorKind::Validation, "checkpoint: empty model");
  auto out = open_out(path);
  out.write(kModelMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(m.d));
  put_u32(out, static_cast<std::uint32_t>(m.hidden));
  for (const auto* tensor : param_tensors(m)) {
    put_f32(out, tensor->data(), tensor->size());
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path, int expected_d) {
  auto in = open_in(path);
  check_magic(in, kModelMagic, path);
  std::uint32_t d = 0, hidden = 0;
  if (!get_u32(in, d) || !get_u32(in, hidden)) {
    fail(ErrorKind::Length, "truncated header: " + path.string());
  }
  if (d == 0 || hidden == 0) fail(ErrorKind::Format, "zero dimension in header: " + path.string());
  if (expected_d != 0 && static_cast<int>(d) != expected_d) {
    fail(ErrorKind::Shape, "checkpoint dimension " + std::to_string(d) +
                               " does not match configured " + std::to_string(expected_d));
  }
  ModelParams m;
  m.resize(static_cast<int>(d), static_cast<int>(hidden));
  for (auto* tensor : param_tensors(m)) {
    if (!get_f32(in, tensor->data(), tensor->size())) {
      fail(ErrorKind::Length, "truncated payload: " + path.string());
    }
  }
  check_eof(in, path);
  for (const auto* tensor : param_tensors(m)) {
    for (float f : *tensor) {
      if (!std::isfinite(f)) fail(ErrorKind::Data, "non-finite parameter: " + path.string());
    }
  }
  return m;
}

void save_exemplars(const ExemplarSet& e, const std::filesystem::path& features,
                    const std::filesystem::path& sidecar) {
  e.validate();
  std::vector<float> flat;
  flat.reserve((e.initial.size() + e.end.size()) * e.d);
  for (const auto& v : e.initial) flat.insert(flat.end(), v.begin(), v.end());
  for (const auto& v : e.end) flat.insert(flat.end(), v.begin(), v.end());
  detail::write_frames(features, flat.data(),
                       static_cast<int>(e.initial.size() + e.end.size()), e.d);

  nlohmann::json j;
  j["initial_count"] = e.initial.size();
  std::ofstream out(sidecar, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open for writing: " + sidecar.string());
  out << j.dump(2) << '\n';
}

ExemplarSet load_exemplars(const std::filesystem::path& features,
                           const std::filesystem::path& sidecar) {
  VideoFeatures raw = detail::read_frames(features);

  std::ifstream in(sidecar);
  if (!in) fail(ErrorKind::Io, "cannot open for reading: " + sidecar.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::Format, "exemplar sidecar: " + std::string(ex.what()));
  }
  if (!j.contains("initial_count") || !j["initial_count"].is_number_unsigned()) {
    fail(ErrorKind::Format, "exemplar sidecar: missing initial_count");
  }
  const int split = j["initial_count"].get<int>();
  if (split < 1 || split >= raw.T) {
    fail(ErrorKind::Format, "exemplar sidecar: split point out of range");
  }

  ExemplarSet e;
  e.d = raw.d;
  for (int t = 1; t <= raw.T; ++t) {
    std::vector<float> vec(raw.frame(t), raw.frame(t) + raw.d);
    (t <= split ? e.initial : e.end).push_back(std::move(vec));
  }
  e.validate();
  return e;
}

}  // namespace lftc
