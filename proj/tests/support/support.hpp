#pragma once

#include "idem/cloud_io.hpp"
#include "idem/geometry.hpp"
#include "idem/random.hpp"

#include <unistd.h>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace idem::test {

inline std::filesystem::path data_dir() { return IDEM_TEST_DATA_DIR; }
inline std::filesystem::path source_dir() { return IDEM_TEST_SOURCE_DIR; }

inline const PointCloud& bunny() {
  static const PointCloud cloud = load_cloud(data_dir() / "bunny_b0.ply");
  return cloud;
}

inline PointCloud random_cloud(RandomSource& rng, std::size_t n, double extent = 10.0) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.emplace_back(rng.uniform(0, extent), rng.uniform(0, extent), rng.uniform(0, extent));
  }
  return PointCloud(std::move(pts));
}

inline Vec3 random_unit(RandomSource& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  return v.normalized();
}

inline RigidTransform random_rigid(RandomSource& rng, double max_translation = 50.0) {
  const Mat3 r = axis_angle_rotation(random_unit(rng), rng.uniform(-180, 180));
  const Vec3 t(rng.uniform(-max_translation, max_translation), rng.uniform(-max_translation, max_translation),
               rng.uniform(-max_translation, max_translation));
  return RigidTransform(r, t);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() /
            ("idem-test-" + name + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

inline double relative_error(double actual, double expected) {
  const double scale = std::max(std::abs(expected), 1.0);
  return std::abs(actual - expected) / scale;
}

}  // namespace idem::test
