#ifndef ENERGY_LAB_HARNESS_HPP_
#define ENERGY_LAB_HARNESS_HPP_

#include "energy_lab/distributions.hpp"
#include "energy_lab/estimators.hpp"
#include "energy_lab/expansion.hpp"
#include "energy_lab/moments.hpp"
#include "energy_lab/numerics.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace energy_lab {

/// Parses "gaussian", "t:<dof>", "exp:<sigma>" or "sinh:<skew>".
Family parse_family(const std::string& label);
/// Inverse of parse_family.
std::string family_label(const Family& family);

/// The ten families of the default sweep.
std::vector<Family> default_families();

struct SweepConfig {
  std::vector<int> dims{16, 32, 64};
  std::vector<Family> families = default_families();
  std::vector<double> mu1_values{0.02, 0.04, 0.06};
  int n_cov = 28;
  std::int64_t n_samples = std::int64_t{1} << 14;
  std::uint64_t master_seed = 20240917;
  EstimatorMode mode = EstimatorMode::UStat;
  /// Each covariance blends I with a random matrix using a closeness drawn
  /// uniformly from [closeness_min, closeness_max].
  double closeness_min = 0.0;
  double closeness_max = 0.1;
  std::optional<std::int64_t> max_pairs;
  /// Monte-Carlo draws for families without closed-form moments.
  std::int64_t moment_samples = std::int64_t{1} << 22;
  /// Worker threads; results do not depend on it.
  unsigned threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SweepRecord {
  int d = 0;
  std::string family;  ///< family_name()
  double param = 0.0;
  int family_kind = 0;  ///< family_id(), used for ordering
  double mu1 = 0.0;
  int mu1_index = 0;
  CovarianceKind cov_kind = CovarianceKind::Wishart;
  int cov_index = 0;
  std::uint64_t seed = 0;
  EstimateWithError estimate;
  MomentFunctionals functionals;
  /// Isotropic-midpoint scale of the pair.
  double lambda = 0.0;
  /// Regression-free prediction; NaN outside the Gaussian family.
  double predicted = 0.0;
  /// |mu|^2 and 2|Delta|_F^2 + Tr(Delta)^2 - |mu|^4 - 4 beta.mu.
  double feature1 = 0.0;
  double feature2 = 0.0;
  std::vector<std::string> flags;

  bool has_flag(const std::string& flag) const;
};

inline constexpr const char* kMomentsUnreliable = "moments_unreliable";

/// Identifies a (d, family) group; ordered like the sweep output.
struct GroupKey {
  int d = 0;
  int family_kind = 0;
  double param = 0.0;
  std::string family;

  std::weak_ordering operator<=>(const GroupKey& o) const {
    if (d != o.d) return d <=> o.d;
    if (family_kind != o.family_kind) return family_kind <=> o.family_kind;
    return std::weak_order(param, o.param);
  }
  bool operator==(const GroupKey& o) const { return (*this <=> o) == 0; }
  std::string label() const;
};

GroupKey group_key(const SweepRecord& r);
std::map<GroupKey, std::vector<SweepRecord>> group_records(std::span<const SweepRecord> records);

/// Orders records by (d, family, param, mu1 index, cov index).
void sort_records(std::vector<SweepRecord>& records);

/// Seed of one sweep cell; independent of execution order.
std::uint64_t cell_seed(std::uint64_t master_seed, int d, const Family& family, int mu1_index,
                        int cov_index);

/// Runs a single cell of the sweep.
SweepRecord run_cell(const SweepConfig& cfg, int d, const Family& family, int mu1_index,
                     int cov_index);

/// Every (d, family, mu1, covariance) cell, sorted. Deterministic for a fixed
/// config regardless of `cfg.threads`.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

/// No-intercept fit estimate ~ alpha1 feature1 + alpha2 feature2 over a group.
/// Throws std::invalid_argument for fewer than 3 records and
/// DegenerateDesignError (naming `group`) for collinear features.
RegressionFit fit_cell_group(std::span<const SweepRecord> records, const std::string& group = "");

struct DirectCheckRow {
  double predicted = 0.0;
  double estimated = 0.0;
  double relative_error = 0.0;
};

struct DirectCheck {
  std::vector<DirectCheckRow> rows;
  double r_squared = 0.0;
};

/// Compares Gaussian-cell predictions with the estimates, no fitting.
/// Throws std::invalid_argument for non-Gaussian records.
DirectCheck gaussian_direct_check(std::span<const SweepRecord> records);

struct MDependentCheck {
  int d = 0;
  /// sqrt(8/d); multiplies D^2 so the mean term becomes mu1^2 / lambda.
  double normalization = 0.0;
  EstimateWithError simulated;
  /// gaussian_expansion on the exact banded Delta.
  ExpansionResult predicted;
  /// Closed form with the asymptotic band count.
  ExpansionResult predicted_asymptotic;

  double normalized_simulated() const { return simulated.value * normalization; }
  double normalized_std_error() const { return simulated.std_error * normalization; }
  double normalized_predicted() const { return predicted.total * normalization; }
};

/// Samples the banded Gaussian pair and compares the estimated D^2 with
/// the expansion.
MDependentCheck mdependent_check(int d, int M, double delta_sq, double rho_sq, double mu1,
                                 double lambda, std::int64_t n_samples, std::uint64_t seed,
                                 const EstimatorOptions& options = {});

}  // namespace energy_lab

#endif  // ENERGY_LAB_HARNESS_HPP_
