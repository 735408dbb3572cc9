#include "tmsim/csv.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace tmsim::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CsvTable: header required");
}

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string render_raster(std::size_t nx, std::size_t rows, double dx, double dz,
                          const std::vector<double>& values) {
  if (values.size() != nx * rows) throw std::invalid_argument("render_raster: size mismatch");
  std::string out(2 * sizeof(std::int64_t) + 2 * sizeof(double) + values.size() * sizeof(double), '\0');
  char* p = out.data();
  const std::int64_t header[2] = {static_cast<std::int64_t>(nx), static_cast<std::int64_t>(rows)};
  std::memcpy(p, header, sizeof header);
  p += sizeof header;
  const double steps[2] = {dx, dz};
  std::memcpy(p, steps, sizeof steps);
  p += sizeof steps;
  if (!values.empty()) std::memcpy(p, values.data(), values.size() * sizeof(double));
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tmsim::io
