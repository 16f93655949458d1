#include "obpm/distribution.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace obpm {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void DistributionTable::write_csv(std::ostream& out) const {
  if (values.size() != densities.size()) {
    throw std::logic_error("DistributionTable: ragged columns");
  }
  out << value_label << "," << density_label << "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << format_g17(values[i]) << "," << format_g17(densities[i]) << "\n";
  }
}

std::string DistributionTable::to_csv() const {
  std::ostringstream ss;
  write_csv(ss);
  return ss.str();
}

void CsvTable::write_csv(std::ostream& out) const {
  if (headers.size() != columns.size()) {
    throw std::logic_error("CsvTable: header/column count mismatch");
  }
  for (std::size_t c = 0; c < headers.size(); ++c) {
    out << headers[c] << (c + 1 < headers.size() ? "," : "");
  }
  out << "\n";
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw std::logic_error("CsvTable: ragged columns");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << format_g17(columns[c][r]) << (c + 1 < columns.size() ? "," : "");
    }
    out << "\n";
  }
}

std::string CsvTable::to_csv() const {
  std::ostringstream ss;
  write_csv(ss);
  return ss.str();
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> xs(n);
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) xs[i] = lo + h * i;
  xs.back() = hi;
  return xs;
}

std::vector<double> default_x_grid() { return linspace(-10.0, 10.0, 801); }

}  // namespace obpm
