#include "idem/grid_io.hpp"

#include "idem/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace idem {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, std::size_t line, const std::string& source) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError("bad number '" + text + "'", line, source);
  return v;
}

std::string axis_label(const SweepGrid& grid, std::size_t k) {
  return std::string(1, "XYZ"[grid.spec.axes[k]]);
}

// Pixel (column, row) of a cell in the image written by write_pgm.
std::pair<std::size_t, std::size_t> pixel_of(const SweepGrid& grid, std::size_t cell) {
  const auto idx = grid.cell_indices(cell);
  const std::size_t n = grid.cells_per_axis();
  const std::size_t col = idx[0];
  std::size_t row = 0;
  if (idx.size() >= 2) row = idx[1];
  if (idx.size() == 3) row += idx[2] * n;
  return {col, row};
}

nlohmann::json cell_json(const SweepGrid& grid, std::size_t cell) {
  const auto [col, row] = pixel_of(grid, cell);
  return {{"indices", grid.cell_indices(cell)},
          {"position", grid.cell_position(cell)},
          {"pixel", {col, row}}};
}

}  // namespace

void write_layer_csv(const SweepGrid& grid, Metric metric, const std::filesystem::path& path) {
  const auto& values = grid.layer(metric);
  const std::size_t n = grid.cells_per_axis();
  auto out = open_out(path);
  if (grid.dimensions() == 1) {
    out << axis_label(grid, 0);
    for (double c : grid.coordinates) out << ',' << fmt(c);
    out << '\n' << to_string(metric);
    for (double v : values) out << ',' << fmt(v);
    out << '\n';
  } else if (grid.dimensions() == 2) {
    out << axis_label(grid, 1) << '\\' << axis_label(grid, 0);
    for (double c : grid.coordinates) out << ',' << fmt(c);
    out << '\n';
    for (std::size_t j = 0; j < n; ++j) {
      out << fmt(grid.coordinates[j]);
      for (std::size_t i = 0; i < n; ++i) out << ',' << fmt(values[i + n * j]);
      out << '\n';
    }
  } else {
    for (std::size_t k = 0; k < grid.dimensions(); ++k) out << axis_label(grid, k) << ',';
    out << to_string(metric) << '\n';
    for (std::size_t c = 0; c < values.size(); ++c) {
      for (double p : grid.cell_position(c)) out << fmt(p) << ',';
      out << fmt(values[c]) << '\n';
    }
  }
  finish(out, path);
}

LayerTable read_layer_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 0, source);
  const auto header = split_csv(line);
  if (header.size() < 2) throw ParseError("header needs coordinates", 1, source);
  LayerTable table;
  for (std::size_t i = 1; i < header.size(); ++i) {
    table.column_coordinates.push_back(parse_number(header[i], 1, source));
  }
  const bool one_d = header[0].find('\\') == std::string::npos;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields", line_no, source);
    }
    if (!one_d) table.row_coordinates.push_back(parse_number(cells[0], line_no, source));
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(parse_number(cells[i], line_no, source));
    table.values.push_back(std::move(row));
  }
  return table;
}

void write_grid_csv(const SweepGrid& grid, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (std::size_t k = 0; k < grid.dimensions(); ++k) out << axis_label(grid, k) << ',';
  for (std::size_t m = 0; m < grid.spec.metrics.size(); ++m) {
    out << (m > 0 ? "," : "") << to_string(grid.spec.metrics[m]);
  }
  out << '\n';
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    for (double p : grid.cell_position(c)) out << fmt(p) << ',';
    for (std::size_t m = 0; m < grid.layers.size(); ++m) {
      out << (m > 0 ? "," : "") << fmt(grid.layers[m][c]);
    }
    out << '\n';
  }
  finish(out, path);
}

void write_pgm(const SweepGrid& grid, Metric metric, const std::filesystem::path& path) {
  const auto& values = grid.layer(metric);
  const std::size_t n = grid.cells_per_axis();
  const std::size_t width = n;
  const std::size_t height = grid.dimensions() == 1 ? 1 : values.size() / n;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  std::vector<unsigned char> pixels(width * height, 0);
  for (std::size_t c = 0; c < values.size(); ++c) {
    const auto [col, row] = pixel_of(grid, c);
    const double t = span > 0.0 ? (values[c] - *lo) / span : 0.0;
    pixels[row * width + col] = static_cast<unsigned char>(std::lround(255.0 * t));
  }
  auto out = open_out(path, true);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  finish(out, path);
}

nlohmann::json image_sidecar(const SweepGrid& grid, Metric metric) {
  const auto& values = grid.layer(metric);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const std::size_t n = grid.cells_per_axis();
  nlohmann::json axes = nlohmann::json::array();
  for (int a : grid.spec.axes) axes.push_back(std::string(1, "XYZ"[a]));
  return {{"metric", to_string(metric)},
          {"width", n},
          {"height", grid.dimensions() == 1 ? 1 : values.size() / n},
          {"axes", axes},
          {"layout", grid.dimensions() == 3 ? "columns: axis 0, rows: axis 1, slices of axis 2 stacked"
                                            : "columns: axis 0, rows: axis 1"},
          {"coordinates", grid.coordinates},
          {"min", *lo},
          {"max", *hi},
          {"zero_cell", cell_json(grid, grid.zero_cell())},
          {"argmin_cell", cell_json(grid, argmin(grid, metric).cell)}};
}

nlohmann::json grid_summary(const SweepGrid& grid) {
  nlohmann::json metrics = nlohmann::json::object();
  for (Metric m : grid.spec.metrics) {
    const auto best = argmin(grid, m);
    metrics[std::string(to_string(m))] = {{"argmin_cell", grid.cell_indices(best.cell)},
                                          {"argmin_position", best.position},
                                          {"argmin_value", best.value},
                                          {"zero_value", grid.layer(m)[grid.zero_cell()]},
                                          {"error", best.error}};
  }
  nlohmann::json metric_names = nlohmann::json::array();
  for (Metric m : grid.spec.metrics) metric_names.push_back(std::string(to_string(m)));
  return {{"spec",
           {{"mode", grid.spec.mode()},
            {"axes", axes_name(grid.spec.axes)},
            {"range", grid.spec.range},
            {"step", grid.spec.step},
            {"a", grid.spec.a},
            {"metrics", metric_names}}},
          {"units", grid.spec.kind == SweepKind::translate ? "cloud units" : "degrees"},
          {"cells_per_axis", grid.cells_per_axis()},
          {"zero_cell", grid.cell_indices(grid.zero_cell())},
          {"fixed_points", grid.fixed_points},
          {"moving_points", grid.moving_points},
          {"r4th_fixed", grid.r4th_fixed},
          {"r4th_moving", grid.r4th_moving},
          {"r4th_weighted", grid.r4th_weighted},
          {"radius", grid.radius},
          {"metrics", metrics}};
}

void write_json(const nlohmann::json& value, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
  finish(out, path);
}

void export_grid(const SweepGrid& grid, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_grid_csv(grid, dir / "grid.csv");
  for (Metric m : grid.spec.metrics) {
    const std::string name(to_string(m));
    write_layer_csv(grid, m, dir / (name + ".csv"));
    write_pgm(grid, m, dir / (name + ".pgm"));
    write_json(image_sidecar(grid, m), dir / (name + ".pgm.json"));
  }
  write_json(grid_summary(grid), dir / "summary.json");
}

}  // namespace idem
