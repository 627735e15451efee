#include "energy_lab/sample_io.hpp"

#include "energy_lab/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace energy_lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RowMatrix read_sample_csv(std::istream& in, const std::string& source) {
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields(t);
    std::string field;
    Eigen::Index col = 0;
    while (std::getline(fields, field, ',')) {
      ++col;
      const std::string f = trim(field);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(f, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (f.empty() || used != f.size()) {
        throw SampleParseError(fmt::format("{}: row {} (line {}), column {}: not a number: '{}'",
                                           source, rows + 1, line_no, col, f));
      }
      if (!std::isfinite(v)) {
        throw SampleParseError(fmt::format("{}: row {} (line {}), column {}: non-finite value",
                                           source, rows + 1, line_no, col));
      }
      values.push_back(v);
    }
    if (t.back() == ',') {
      throw SampleParseError(fmt::format("{}: row {} (line {}), column {}: empty field", source,
                                         rows + 1, line_no, col + 1));
    }
    if (cols < 0) {
      cols = col;
    } else if (col != cols) {
      throw SampleParseError(fmt::format("{}: row {} (line {}): expected {} columns, found {}",
                                         source, rows + 1, line_no, cols, col));
    }
    ++rows;
  }
  if (rows == 0) throw SampleParseError(source + ": no sample rows");
  RowMatrix out(rows, cols);
  std::copy(values.begin(), values.end(), out.data());
  return out;
}

RowMatrix read_sample_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw SampleParseError("cannot open sample file '" + path.string() + "'");
  return read_sample_csv(f, path.string());
}

void write_sample_csv(std::ostream& out, const RowMatrix& data) {
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_number(data(i, j));
    }
    out << '\n';
  }
}

}  // namespace energy_lab
