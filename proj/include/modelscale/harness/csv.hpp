#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace modelscale::harness {

// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header);

  struct Cell {
    std::string text;
    Cell(double v) : text(format_double(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(long v) : text(std::to_string(v)) {}
    Cell(std::size_t v) : text(std::to_string(v)) {}
    Cell(bool v) : text(v ? "1" : "0") {}
    Cell(const char* v) : text(v) {}
    Cell(std::string v) : text(std::move(v)) {}
  };

  // Throws ArgumentError when the width differs from the header.
  void add_row(std::vector<Cell> cells);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  // -1 when absent.
  int column(const std::string& name) const;
  double number(std::size_t row, int column) const;

  std::string to_string() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Plain comma-separated reader (no quoting). Throws ArgumentError on a
// missing file, an empty file or ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace modelscale::harness
