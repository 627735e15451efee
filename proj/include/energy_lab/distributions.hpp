#ifndef ENERGY_LAB_DISTRIBUTIONS_HPP_
#define ENERGY_LAB_DISTRIBUTIONS_HPP_

#include "energy_lab/numerics.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <variant>

namespace energy_lab {

// Transformations applied to a Gaussian core Z ~ N(mean, base_cov).
struct Gaussian {};
/// mean + (Z - mean) / sqrt(chi2_dof / dof), one chi-square draw per vector.
struct MultivariateT {
  double dof;
};
/// exp(sigma * Z), componentwise.
struct ExpScale {
  double sigma;
};
/// sinh(asinh(Z) + skew), componentwise, tail weight 1.
struct SinhArcsinhSkew {
  double skew;
};

using Family = std::variant<Gaussian, MultivariateT, ExpScale, SinhArcsinhSkew>;

std::string family_name(const Family& family);
/// The family's shape parameter (0 for Gaussian).
double family_param(const Family& family);
/// Stable small integer identifying the family kind (used for seeding).
int family_id(const Family& family);

struct DistributionSpec {
  Family family = Gaussian{};
  Vector mean;
  /// For MultivariateT this is the scale matrix of the Gaussian core, not
  /// the covariance of the law.
  Matrix base_cov;

  int dim() const { return static_cast<int>(mean.size()); }

  /// Throws std::invalid_argument / std::domain_error on bad shapes, a
  /// non-symmetric or non-positive-definite base_cov, or bad shape params.
  void validate() const;

  /// Hex digest of the family, parameters, mean and covariance bytes.
  std::string digest() const;
};

DistributionSpec make_spec(Family family, Vector mean, Matrix base_cov);

struct SampleMatrix {
  RowMatrix data;
  std::uint64_t seed = 0;
  std::string spec_digest;

  Eigen::Index rows() const { return data.rows(); }
  int dim() const { return static_cast<int>(data.cols()); }
};

/// Wraps explicit data as a sample; throws on non-finite entries.
SampleMatrix make_sample(RowMatrix data, std::uint64_t seed = 0, std::string digest = {});

/// Sequential row generator for a spec. sample(spec, n, seed) is the first
/// n rows of SampleStream(spec, seed); streaming lets large Monte-Carlo
/// moment estimates run in bounded memory.
class SampleStream {
 public:
  SampleStream(const DistributionSpec& spec, std::uint64_t seed);

  RowMatrix next(Eigen::Index n);

 private:
  DistributionSpec spec_;
  Matrix chol_lower_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::chi_squared_distribution<double> chi2_;
};

/// n i.i.d. rows from `spec`. Bit-identical for identical (spec, n, seed).
SampleMatrix sample(const DistributionSpec& spec, Eigen::Index n, std::uint64_t seed);

enum class CovarianceKind { Wishart, ExpDecay };

std::string to_string(CovarianceKind kind);

/// (1 - closeness) I + closeness K, where K is a trace-normalized
/// (trace d) Wishart matrix with 2d degrees of freedom, or an exponential
/// decay correlation matrix exp(-|i-j| / l) with l ~ U[1, d/4].
Matrix random_covariance(CovarianceKind kind, int d, double closeness, std::uint64_t seed);

/// Symmetric banded difference of covariances: delta_sq on the diagonal and
/// rho_sq on the first M sub/super diagonals.
struct BandedDelta {
  int d = 2;
  double delta_sq = 0.0;
  double rho_sq = 0.0;
  int M = 0;

  void validate() const;
  Matrix matrix() const;
  /// Exact |Delta|_F^2 = d delta^4 + 2 rho^4 (M d - M (M+1) / 2).
  double frobenius_sq() const;
};

/// X ~ N((mu1, ..., mu1), lambda^2 I + Delta/2), Y ~ N(0, lambda^2 I - Delta/2).
/// Throws std::domain_error naming the offending eigenvalue when either
/// covariance is not positive definite.
std::pair<DistributionSpec, DistributionSpec> banded_gaussian_pair(const BandedDelta& b,
                                                                   double mu1, double lambda);

}  // namespace energy_lab

#endif  // ENERGY_LAB_DISTRIBUTIONS_HPP_
