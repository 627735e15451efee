#ifndef ENERGY_LAB_SWEEP_CONFIG_HPP_
#define ENERGY_LAB_SWEEP_CONFIG_HPP_

#include "energy_lab/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace energy_lab {

/// Invalid or unknown configuration entry.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SweepConfig sweep;
  std::optional<std::filesystem::path> out_dir;
};

/// Reads an INI-style file:
///
///   [sweep]
///   dims = 16, 32, 64
///   families = gaussian, t:5, exp:1, sinh:0.1
///   mu1 = 0.02, 0.04, 0.06
///   n_cov = 28
///   n_samples = 16384
///   seed = 20240917
///   mode = ustat
///   closeness_min = 0
///   closeness_max = 0.1
///   max_pairs = 1000000
///   moment_samples = 4194304
///   threads = 1
///
///   [output]
///   out_dir = results
///
/// Missing keys keep their defaults. Unknown sections or keys raise
/// ConfigError naming them.
RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace energy_lab

#endif  // ENERGY_LAB_SWEEP_CONFIG_HPP_
