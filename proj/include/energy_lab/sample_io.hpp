#ifndef ENERGY_LAB_SAMPLE_IO_HPP_
#define ENERGY_LAB_SAMPLE_IO_HPP_

#include "energy_lab/numerics.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace energy_lab {

/// Malformed sample file; the message carries the file, row and column.
class SampleParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads comma separated rows of numbers, one draw per line. Blank lines and
/// lines starting with '#' are skipped. Every row must have the same number
/// of columns and every value must be finite.
RowMatrix read_sample_csv(std::istream& in, const std::string& source = "<input>");
RowMatrix read_sample_csv(const std::filesystem::path& path);

void write_sample_csv(std::ostream& out, const RowMatrix& data);

}  // namespace energy_lab

#endif  // ENERGY_LAB_SAMPLE_IO_HPP_
