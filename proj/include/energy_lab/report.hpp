#ifndef ENERGY_LAB_REPORT_HPP_
#define ENERGY_LAB_REPORT_HPP_

#include "energy_lab/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace energy_lab {

/// Column order of sweep.csv.
inline constexpr const char* kSweepHeader =
    "d,family,param,mu1,cov_kind,cov_index,seed,estimate,std_error,f_mu2,f_mu4,f_frob2,"
    "f_trace2,f_beta_mu,feature1,feature2,predicted,flags";
inline constexpr const char* kFitsHeader = "d,family,param,alpha1,alpha2,r_squared,n_records,status";

/// Per-group regression outcome. status is "ok", "skipped" (fewer than 3
/// records) or "degenerate" (collinear features).
struct GroupFit {
  GroupKey key;
  std::optional<RegressionFit> fit;
  std::size_t n_records = 0;
  std::string status;
  /// R^2 of the regression-free Gaussian prediction; NaN otherwise.
  double direct_r_squared = 0.0;
};

std::vector<GroupFit> fit_groups(std::span<const SweepRecord> records);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);
void write_fits_csv(std::ostream& out, std::span<const GroupFit> fits);

/// Parses sweep.csv text back into records (moments-derived scalars only;
/// n_x / n_y are not stored). Throws std::runtime_error with the line number
/// on malformed input.
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

/// Scatter of estimated vs predicted D^2 with a 45 degree line and an R^2
/// label. One circle per record.
std::string scatter_svg(const std::string& title, std::span<const double> predicted,
                        std::span<const double> estimated, double r_squared);

/// Writes sweep.csv, fits.csv and one SVG per group with predictions into
/// out_dir (created if missing). Returns the written paths.
/// Throws std::runtime_error when a file cannot be written.
std::vector<std::filesystem::path> emit_report(std::span<const SweepRecord> records,
                                               std::span<const GroupFit> fits,
                                               const std::filesystem::path& out_dir);

/// "d,family,param,r_squared,direct_r_squared,n_records,status" lines.
void write_summary(std::ostream& out, std::span<const GroupFit> fits);

}  // namespace energy_lab

#endif  // ENERGY_LAB_REPORT_HPP_
