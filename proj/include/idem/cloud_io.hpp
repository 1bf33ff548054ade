#pragma once

#include "idem/geometry.hpp"

#include <filesystem>
#include <string_view>

namespace idem {

enum class CloudFormat {
  xyz_text,   // "x y z" per line, '#' starts a comment
  ply_ascii,  // ascii PLY, vertex element with x, y, z properties
};

/// `.ply` → ply_ascii, anything else → xyz_text.
CloudFormat format_from_path(const std::filesystem::path& path);
CloudFormat parse_cloud_format(std::string_view name);

/// Throws IoError if the file cannot be opened, ParseError (with line number)
/// on malformed content and UnsupportedFeatureError for binary PLY or elements
/// other than a single vertex element.
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);
inline PointCloud load_cloud(const std::filesystem::path& path) {
  return load_cloud(path, format_from_path(path));
}

/// Writes with 17 significant digits so that a reload is exact.
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format);
inline void save_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  save_cloud(cloud, path, format_from_path(path));
}

}  // namespace idem
