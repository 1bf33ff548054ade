#include "idem/cloud_io.hpp"

#include "idem/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace idem {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view token, std::size_t line_no, const std::string& source) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("invalid number '" + std::string(token) + "'", line_no, source);
  }
  return value;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<Vec3> read_xyz(std::istream& in, const std::string& source) {
  std::vector<Vec3> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    const auto tokens = split_ws(body);
    if (tokens.empty()) continue;
    if (tokens.size() != 3) {
      throw ParseError("expected 3 coordinates, found " + std::to_string(tokens.size()), line_no, source);
    }
    Vec3 p(parse_double(tokens[0], line_no, source), parse_double(tokens[1], line_no, source),
           parse_double(tokens[2], line_no, source));
    if (!p.allFinite()) throw ParseError("non-finite coordinate", line_no, source);
    points.push_back(p);
  }
  if (points.empty()) throw ParseError("file contains no points", 0, source);
  return points;
}

struct PlyProperty {
  std::string name;
};

std::vector<Vec3> read_ply(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") throw ParseError("missing 'ply' magic", line_no, source);

  std::size_t vertex_count = 0;
  bool have_vertex = false;
  bool have_format = false;
  std::vector<PlyProperty> vertex_props;
  std::string current_element;
  while (true) {
    if (!next_line()) throw ParseError("unterminated PLY header", line_no, source);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::string_view key = tokens[0];
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      if (tokens.size() < 2) throw ParseError("incomplete format line", line_no, source);
      if (tokens[1] != "ascii") {
        throw UnsupportedFeatureError("unsupported PLY format '" + std::string(tokens[1]) +
                                          "' (only ascii is supported)",
                                      line_no, source);
      }
      have_format = true;
    } else if (key == "element") {
      if (tokens.size() != 3) throw ParseError("malformed element line", line_no, source);
      current_element = std::string(tokens[1]);
      const double count = parse_double(tokens[2], line_no, source);
      if (current_element == "vertex") {
        if (have_vertex) throw ParseError("duplicate vertex element", line_no, source);
        have_vertex = true;
        vertex_count = static_cast<std::size_t>(count);
      } else if (count > 0) {
        throw UnsupportedFeatureError("unsupported PLY element '" + current_element + "'", line_no, source);
      }
    } else if (key == "property") {
      if (current_element != "vertex") continue;
      if (tokens.size() >= 2 && tokens[1] == "list") {
        throw UnsupportedFeatureError("list property on vertex element", line_no, source);
      }
      if (tokens.size() != 3) throw ParseError("malformed property line", line_no, source);
      vertex_props.push_back({std::string(tokens[2])});
    } else {
      throw ParseError("unknown header keyword '" + std::string(key) + "'", line_no, source);
    }
  }
  if (!have_format) throw ParseError("PLY header has no format line", line_no, source);
  if (!have_vertex) throw ParseError("PLY header has no vertex element", line_no, source);

  auto column = [&](const char* name) -> std::size_t {
    const auto it = std::find_if(vertex_props.begin(), vertex_props.end(),
                                 [&](const PlyProperty& p) { return p.name == name; });
    if (it == vertex_props.end()) {
      throw ParseError(std::string("vertex element lacks property '") + name + "'", line_no, source);
    }
    return static_cast<std::size_t>(it - vertex_props.begin());
  };
  const std::size_t cx = column("x"), cy = column("y"), cz = column("z");

  std::vector<Vec3> points;
  points.reserve(vertex_count);
  while (points.size() < vertex_count) {
    if (!next_line()) {
      throw ParseError("expected " + std::to_string(vertex_count) + " vertices, found " +
                           std::to_string(points.size()),
                       line_no, source);
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != vertex_props.size()) {
      throw ParseError("expected " + std::to_string(vertex_props.size()) + " values, found " +
                           std::to_string(tokens.size()),
                       line_no, source);
    }
    Vec3 p(parse_double(tokens[cx], line_no, source), parse_double(tokens[cy], line_no, source),
           parse_double(tokens[cz], line_no, source));
    if (!p.allFinite()) throw ParseError("non-finite coordinate", line_no, source);
    points.push_back(p);
  }
  while (next_line()) {
    if (!split_ws(line).empty()) throw ParseError("trailing data after vertex list", line_no, source);
  }
  if (points.empty()) throw ParseError("file contains no points", 0, source);
  return points;
}

}  // namespace

CloudFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".ply" ? CloudFormat::ply_ascii : CloudFormat::xyz_text;
}

CloudFormat parse_cloud_format(std::string_view name) {
  if (name == "xyz" || name == "xyz-text") return CloudFormat::xyz_text;
  if (name == "ply" || name == "ply-ascii") return CloudFormat::ply_ascii;
  throw ValidationError("unknown cloud format '" + std::string(name) + "'");
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string source = path.string();
  auto points = format == CloudFormat::ply_ascii ? read_ply(in, source) : read_xyz(in, source);
  return PointCloud(std::move(points), path.stem().string());
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  char buf[96];
  if (format == CloudFormat::ply_ascii) {
    out << "ply\nformat ascii 1.0\n";
    if (!cloud.label().empty()) out << "comment " << cloud.label() << '\n';
    out << "element vertex " << cloud.size() << '\n'
        << "property double x\nproperty double y\nproperty double z\nend_header\n";
  }
  for (const Vec3& p : cloud.points()) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace idem
