#ifndef OBPM_DISTRIBUTION_HPP
#define OBPM_DISTRIBUTION_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace obpm {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

/// Labeled (value, probability/density) rows; the CSV-facing result type.
/// CSV bodies use 17 significant digits, a header row, and LF line endings.
struct DistributionTable {
  std::string value_label = "x";
  std::string density_label = "density";
  std::vector<double> values;
  std::vector<double> densities;

  std::size_t size() const { return values.size(); }
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

/// General numeric CSV with named columns, same formatting contract.
struct CsvTable {
  std::vector<std::string> headers;
  std::vector<std::vector<double>> columns;

  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

std::vector<double> linspace(double lo, double hi, int n);

/// Default homodyne grid: 801 uniform points on [-10, 10].
std::vector<double> default_x_grid();

}  // namespace obpm

#endif
