#pragma once

// Static SVG 1.1 line and step charts drawn from CSV columns.

#include <filesystem>
#include <string>
#include <vector>

#include "modelscale/errors.hpp"
#include "modelscale/harness/csv.hpp"

namespace modelscale::harness {

// Bad plot request (missing column, empty data). Maps to exit status 2.
class PlotError : public Error {
 public:
  using Error::Error;
};

struct PlotMarker {
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

struct PlotSpec {
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;
  // Long-format data: one series per distinct value of this column
  // (requires exactly one y column).
  std::string group_column;
  bool step = false;  // hold each value until the next x
  bool log_x = false;
  bool log_y = false;
  std::string x_label;  // default: x_column
  std::string y_label;  // default: y column names
  std::vector<PlotMarker> markers;
};

std::string render_plot(const CsvTable& table, const PlotSpec& spec);

// Reads the CSV, renders and writes the SVG. Every failure is a PlotError.
void emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec,
               const std::filesystem::path& svg_path);

}  // namespace modelscale::harness
