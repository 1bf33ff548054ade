#pragma once

#include "idem/sweep.hpp"

#include "json.hpp"

#include <filesystem>
#include <vector>

namespace idem {

/// One metric layer as a table. 1D grids have a single row with an empty
/// row coordinate list; 2D grids have one row per second-axis coordinate.
struct LayerTable {
  std::vector<double> column_coordinates;
  std::vector<double> row_coordinates;
  std::vector<std::vector<double>> values;  // values[row][column]
};

/// Writes one layer. 1D: header "X,c0,c1,..." and one row "<metric>,v0,...".
/// 2D: header "Y\X,x0,x1,..." then one row per Y coordinate.
/// 3D: long format "X,Y,Z,<metric>". Values use 17 significant digits.
void write_layer_csv(const SweepGrid& grid, Metric metric, const std::filesystem::path& path);

/// Reads a 1D or 2D layer file written by write_layer_csv.
LayerTable read_layer_csv(const std::filesystem::path& path);

/// Long format with one row per cell: swept axis coordinates, then every metric.
void write_grid_csv(const SweepGrid& grid, const std::filesystem::path& path);

/// Binary 8-bit PGM, min-max normalised (a constant layer is all black).
/// Width is the first swept axis, height the second; 3D grids stack the
/// slices of the third axis vertically. Row 0 is the lowest coordinate.
void write_pgm(const SweepGrid& grid, Metric metric, const std::filesystem::path& path);

/// Pixel positions of the zero cell and argmin cell, value range and axis
/// layout of the image written by write_pgm.
nlohmann::json image_sidecar(const SweepGrid& grid, Metric metric);

/// Spec, radii, point counts, and per-metric argmin cell, value and error.
nlohmann::json grid_summary(const SweepGrid& grid);

/// grid.csv, <metric>.csv, <metric>.pgm, <metric>.pgm.json and summary.json in `dir`.
void export_grid(const SweepGrid& grid, const std::filesystem::path& dir);

/// Writes `value` pretty-printed; throws IoError on failure.
void write_json(const nlohmann::json& value, const std::filesystem::path& path);

}  // namespace idem
