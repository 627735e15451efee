#ifndef ENERGY_LAB_ESTIMATORS_HPP_
#define ENERGY_LAB_ESTIMATORS_HPP_

#include "energy_lab/numerics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace energy_lab {

using SampleView = Eigen::Ref<const RowMatrix>;

enum class EstimatorMode {
  UStat,  ///< within-sample averages exclude self pairs, divide by N(N-1)
  VStat,  ///< within-sample averages include self pairs, divide by N^2
};

std::string to_string(EstimatorMode mode);
/// Parses "ustat" / "vstat" (case-insensitive).
EstimatorMode parse_estimator_mode(const std::string& text);

struct EstimatorOptions {
  EstimatorMode mode = EstimatorMode::UStat;
  /// When set, both samples are truncated to their first k rows with
  /// k^2 <= max_pairs. Rows are i.i.d., so a prefix is a valid subsample.
  std::optional<std::int64_t> max_pairs;
  /// Worker threads for the pairwise kernel. Results do not depend on it.
  unsigned threads = 1;
};

struct EstimateWithError {
  double value = 0.0;
  /// Leave-one-out jackknife over the rows of x only; an approximation that
  /// ignores the variability contributed by y. Zero when x has too few rows.
  double std_error = 0.0;
  std::int64_t n_x = 0;
  std::int64_t n_y = 0;
};

/// r_i = sum_j |a_i - b_j| (Euclidean) for every row of a. Each r_i is
/// accumulated in a fixed order, so the result is thread-count independent.
std::vector<double> pairwise_row_sums(const SampleView& a, const SampleView& b,
                                      unsigned threads = 1);

/// Sample energy score of an ensemble `forecast` against one observation:
/// mean |x_n - y| - sum_{n != m} |x_n - x_m| / (2 N (N-1)).
double energy_score(const SampleView& forecast, const Vector& observation, unsigned threads = 1);

/// Mean of energy_score over time steps.
double averaged_energy_score(std::span<const RowMatrix> forecasts,
                             std::span<const Vector> observations, unsigned threads = 1);

/// Squared energy distance E|X-Y| - E|X-X'|/2 - E|Y-Y'|/2 from two samples.
EstimateWithError energy_distance_sq(const SampleView& x, const SampleView& y,
                                     const EstimatorOptions& options = {});

}  // namespace energy_lab

#endif  // ENERGY_LAB_ESTIMATORS_HPP_
