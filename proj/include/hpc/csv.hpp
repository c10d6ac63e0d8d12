#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace hpc {

/// Minimal CSV writer: header row, doubles with 17 significant digits.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// "%.17g"
std::string format_double(double v);

}  // namespace hpc
