#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lftc/error.hpp"
#include "lftc/io.hpp"
#include "lftc/manifest.hpp"
#include "lftc/rng.hpp"

using namespace lftc;
namespace fs = std::filesystem;

namespace {

// A minimal on-disk category with two videos and one exemplar pair.
fs::path write_fixture(bool duplicate_ids = false, bool dangling_exemplars = false) {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("lftc_manifest_" + std::to_string(counter++));
  fs::create_directories(dir / "features");

  Rng rng(1);
  for (const char* name : {"a", "b"}) {
    VideoFeatures v;
    v.T = 5;
    v.d = 2;
    v.data.resize(10);
    for (float& x : v.data) x = static_cast<float>(rng.normal());
    write_feature_file(v, dir / "features" / (std::string(name) + ".lftc"));
  }
  ExemplarSet e;
  e.d = 2;
  e.initial = {{1, 0}};
  e.end = {{0, 1}};
  if (!dangling_exemplars) save_exemplars(e, dir / "ex.lftc", dir / "ex.json");

  std::ofstream out(dir / "manifest.json");
  out << R"({
  "category": "demo",
  "exemplars": {"features": "ex.lftc", "sidecar": "ex.json"},
  "videos": [
    {"id": "a", "features": "features/a.lftc", "gt": "biaeb", "segments": [2, 3]},
    {"id": ")"
      << (duplicate_ids ? "a" : "b") << R"(", "features": "features/b.lftc"}
  ]
})";
  return dir;
}

}  // namespace

TEST_CASE("manifest loads and resolves into a category") {
  const fs::path dir = write_fixture();
  const DatasetManifest m = load_manifest(dir / "manifest.json");
  CHECK(m.category == "demo");
  REQUIRE(m.videos.size() == 2);
  CHECK(m.videos[0].gt.has_value());
  CHECK(m.videos[0].segments.has_value());
  CHECK_FALSE(m.videos[1].gt.has_value());

  const LoadedCategory cat = load_category(m);
  CHECK(cat.videos.size() == 2);
  CHECK(cat.videos[0].features.T == 5);
  CHECK(cat.exemplars.initial.size() == 1);
}

TEST_CASE("duplicate video ids are rejected") {
  const fs::path dir = write_fixture(/*duplicate_ids=*/true);
  try {
    load_manifest(dir / "manifest.json");
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
  }
}

TEST_CASE("dangling exemplar reference is rejected") {
  const fs::path dir = write_fixture(false, /*dangling_exemplars=*/true);
  try {
    load_manifest(dir / "manifest.json");
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
  }
}

TEST_CASE("manifest round-trips through save_manifest") {
  const fs::path dir = write_fixture();
  const DatasetManifest m = load_manifest(dir / "manifest.json");
  save_manifest(m, dir / "copy.json");
  const DatasetManifest back = load_manifest(dir / "copy.json");
  CHECK(back.category == m.category);
  REQUIRE(back.videos.size() == m.videos.size());
  CHECK(back.videos[0].id == m.videos[0].id);
  CHECK(back.videos[0].gt->seq == m.videos[0].gt->seq);
  CHECK(*back.videos[0].segments == *m.videos[0].segments);
}

TEST_CASE("gt with unknown characters is rejected") {
  const fs::path dir = write_fixture();
  std::ofstream out(dir / "manifest.json");
  out << R"({"category": "demo",
             "exemplars": {"features": "ex.lftc", "sidecar": "ex.json"},
             "videos": [{"id": "a", "features": "features/a.lftc", "gt": "bixeb"}]})";
  out.close();
  CHECK_THROWS_AS(load_manifest(dir / "manifest.json"), Error);
}

TEST_CASE("gt length mismatch is a shape error at load_category") {
  const fs::path dir = write_fixture();
  std::ofstream out(dir / "manifest.json");
  out << R"({"category": "demo",
             "exemplars": {"features": "ex.lftc", "sidecar": "ex.json"},
             "videos": [{"id": "a", "features": "features/a.lftc", "gt": "bia"}]})";
  out.close();
  const DatasetManifest m = load_manifest(dir / "manifest.json");
  try {
    load_category(m);
    FAIL("expected shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
}
