#include "hpc/csv.hpp"

#include <cstdio>

#include "hpc/core.hpp"

namespace hpc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << escape(header[i]);
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw Error("CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    if (const double* d = std::get_if<double>(&cells[i])) {
      out_ << format_double(*d);
    } else if (const long long* n = std::get_if<long long>(&cells[i])) {
      out_ << *n;
    } else {
      out_ << escape(std::get<std::string>(cells[i]));
    }
  }
  out_ << '\n';
}

}  // namespace hpc
