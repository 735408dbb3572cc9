#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace tmsim::io {

/// Scientific notation with 17 significant digits; round-trips every double.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<double> row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  std::string render() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Binary raster: int64 nx, int64 rows, float64 dx, float64 dz, then rows x nx
/// float64 values, row-major, little-endian host order.
std::string render_raster(std::size_t nx, std::size_t rows, double dx, double dz,
                          const std::vector<double>& values);

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace tmsim::io
