#ifndef ENERGY_LAB_NUMERICS_HPP_
#define ENERGY_LAB_NUMERICS_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace energy_lab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Samples are stored one draw per row so a draw is a contiguous span.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Thrown when a least-squares design cannot be solved reliably.
class DegenerateDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ambient dimension d of the unit sphere S^{d-1}; always at least 2.
class SphereDim {
 public:
  explicit SphereDim(int d);
  int value() const { return d_; }

 private:
  int d_;
};

/// Dense fully-symmetric third-order tensor, e.g. a third-cumulant difference.
class Tensor3 {
 public:
  explicit Tensor3(int d) : d_(d), v_(static_cast<std::size_t>(d) * d * d) {}

  int dim() const { return d_; }
  double operator()(int i, int j, int k) const { return v_[index(i, j, k)]; }

  /// Writes `value` into all permutations of (i, j, k).
  void set_symmetric(int i, int j, int k, double value);

  /// Adds w * a (x) a (x) a.
  void add_rank_one(double w, const Vector& a);

  /// sum_{i,j} T_iij mu_j.
  double contract_iij(const Vector& mu) const;

  /// sum_{i,j,k} T_ijk th_i th_j th_k.
  double cubic_form(std::span<const double> theta) const;

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * d_ + j) * d_ + k;
  }
  int d_;
  std::vector<double> v_;
};

/// Surface measure of S^{d-1}: 2 pi^{d/2} / Gamma(d/2). Evaluated in log space.
double surface_volume(int d);

/// Natural log of surface_volume(d).
double log_surface_volume(int d);

/// Exact integral over S^{d-1} of prod theta_i^{a_i}, with d = exponents.size().
double sphere_monomial_integral(std::span<const int> exponents);

/// Checked form: exponents.size() must equal d.
double sphere_monomial_integral(std::span<const int> exponents, int d);

/// int (theta . mu)^2 dOmega = |mu|^2 Vol / d.
double linear_square_sphere_integral(const Vector& mu);

/// int (theta . mu)^4 dOmega = 3 |mu|^4 Vol / (d (d+2)).
double linear_quartic_sphere_integral(const Vector& mu);

/// int (theta . Delta theta)^2 dOmega = [2 |Delta|_F^2 + Tr(Delta)^2] Vol / (d (d+2)).
/// Throws std::invalid_argument if Delta is not symmetric.
double quadratic_form_sphere_integral(const Matrix& delta);

/// int (theta . mu) sum kappa_ijk th_i th_j th_k dOmega
///   = 3 sum_{ij} kappa_iij mu_j Vol / (d (d+2)).
double skew_contraction_sphere_integral(const Tensor3& kappa, const Vector& mu);

/// Throws std::invalid_argument if `m` is not square and symmetric to a
/// relative tolerance of 1e-12. `what` names the argument in the message.
void require_symmetric(const Matrix& m, const std::string& what);

struct RegressionFit {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  /// 1 - SS_res / SS_tot with SS_tot about the target mean.
  double r_squared = 0.0;
};

/// No-intercept least squares targets ~ alpha1 * f1 + alpha2 * f2 where
/// features has two columns. Solved with the 2x2 normal equations.
/// Throws DegenerateDesignError when the columns are (numerically) collinear,
/// i.e. the design condition number exceeds 1e12.
RegressionFit fit_two_term(const Matrix& features, const Vector& targets);

/// Coefficient of determination of fixed predictions (no fitting).
double r_squared(std::span<const double> predicted, std::span<const double> observed);

/// E|Z| for Z ~ Normal(m, s^2) by adaptive Gauss-Kronrod quadrature
/// (absolute tolerance ~1e-10). Used as an oracle for the 1-d estimators.
double quad_abs_normal_mean(double m, double s);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace energy_lab

#endif  // ENERGY_LAB_NUMERICS_HPP_
