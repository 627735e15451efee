#include "energy_lab/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace energy_lab {

SphereDim::SphereDim(int d) : d_(d) {
  if (d < 2) {
    throw std::domain_error("sphere dimension must satisfy d >= 2, got " +
                            std::to_string(d));
  }
}

void Tensor3::set_symmetric(int i, int j, int k, double value) {
  v_[index(i, j, k)] = value;
  v_[index(i, k, j)] = value;
  v_[index(j, i, k)] = value;
  v_[index(j, k, i)] = value;
  v_[index(k, i, j)] = value;
  v_[index(k, j, i)] = value;
}

void Tensor3::add_rank_one(double w, const Vector& a) {
  if (a.size() != d_) throw std::invalid_argument("rank-one factor has wrong size");
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      for (int k = 0; k < d_; ++k) v_[index(i, j, k)] += w * a[i] * a[j] * a[k];
}

double Tensor3::contract_iij(const Vector& mu) const {
  if (mu.size() != d_) throw std::invalid_argument("contraction vector has wrong size");
  double s = 0.0;
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) s += v_[index(i, i, j)] * mu[j];
  return s;
}

double Tensor3::cubic_form(std::span<const double> theta) const {
  double s = 0.0;
  for (int i = 0; i < d_; ++i) {
    double si = 0.0;
    for (int j = 0; j < d_; ++j) {
      const double* row = &v_[index(i, j, 0)];
      double sj = 0.0;
      for (int k = 0; k < d_; ++k) sj += row[k] * theta[k];
      si += sj * theta[j];
    }
    s += si * theta[i];
  }
  return s;
}

double log_surface_volume(int d) {
  if (d < 1) {
    throw std::domain_error("surface_volume requires d >= 1, got " + std::to_string(d));
  }
  const double half = 0.5 * d;
  return std::log(2.0) + half * std::log(std::numbers::pi) - std::lgamma(half);
}

double surface_volume(int d) { return std::exp(log_surface_volume(d)); }

double sphere_monomial_integral(std::span<const int> exponents) {
  if (exponents.empty()) throw std::invalid_argument("empty exponent list");
  double log_num = 0.0;
  double total = 0.0;
  for (int a : exponents) {
    if (a < 0) throw std::invalid_argument("negative exponent");
    if (a % 2 != 0) return 0.0;
    const double h = 0.5 * (a + 1);
    log_num += std::lgamma(h);
    total += h;
  }
  return 2.0 * std::exp(log_num - std::lgamma(total));
}

double sphere_monomial_integral(std::span<const int> exponents, int d) {
  if (static_cast<int>(exponents.size()) != d) {
    throw std::invalid_argument("exponent list length " + std::to_string(exponents.size()) +
                                " does not match dimension " + std::to_string(d));
  }
  return sphere_monomial_integral(exponents);
}

namespace {

double quartic_weight(int d) {
  return surface_volume(d) / (static_cast<double>(d) * (d + 2));
}

}  // namespace

double linear_square_sphere_integral(const Vector& mu) {
  const int d = static_cast<int>(mu.size());
  return mu.squaredNorm() * surface_volume(d) / d;
}

double linear_quartic_sphere_integral(const Vector& mu) {
  const double n2 = mu.squaredNorm();
  return 3.0 * n2 * n2 * quartic_weight(static_cast<int>(mu.size()));
}

void require_symmetric(const Matrix& m, const std::string& what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(what + " must be square, got " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()));
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale)) {
    throw std::invalid_argument(what + " is not symmetric (max |A - A^T| = " +
                                std::to_string(asym) + ")");
  }
}

double quadratic_form_sphere_integral(const Matrix& delta) {
  require_symmetric(delta, "Delta");
  const int d = static_cast<int>(delta.rows());
  const double tr = delta.trace();
  return (2.0 * delta.squaredNorm() + tr * tr) * quartic_weight(d);
}

double skew_contraction_sphere_integral(const Tensor3& kappa, const Vector& mu) {
  return 3.0 * kappa.contract_iij(mu) * quartic_weight(kappa.dim());
}

RegressionFit fit_two_term(const Matrix& features, const Vector& targets) {
  if (features.cols() != 2) throw std::invalid_argument("fit_two_term expects two feature columns");
  if (features.rows() != targets.size()) {
    throw std::invalid_argument("feature rows and target length differ");
  }
  if (features.rows() < 2) throw std::invalid_argument("fit_two_term needs at least two rows");

  const double g11 = features.col(0).squaredNorm();
  const double g22 = features.col(1).squaredNorm();
  const double g12 = features.col(0).dot(features.col(1));

  // Eigenvalues of the symmetric 2x2 Gram matrix; cond(X) = sqrt(cond(G)).
  const double mean = 0.5 * (g11 + g22);
  const double rad = std::hypot(0.5 * (g11 - g22), g12);
  const double ev_max = mean + rad;
  const double ev_min = std::max(0.0, (g11 * g22 - g12 * g12) / (ev_max > 0 ? ev_max : 1.0));
  if (!(ev_max > 0.0) || !(ev_min > 0.0) || std::sqrt(ev_max / ev_min) > 1e12) {
    throw DegenerateDesignError(
        "degenerate design: feature columns 'feature1' and 'feature2' are collinear or zero");
  }

  const double b1 = features.col(0).dot(targets);
  const double b2 = features.col(1).dot(targets);
  const double det = g11 * g22 - g12 * g12;
  RegressionFit fit;
  fit.alpha1 = (g22 * b1 - g12 * b2) / det;
  fit.alpha2 = (g11 * b2 - g12 * b1) / det;

  const Vector pred = fit.alpha1 * features.col(0) + fit.alpha2 * features.col(1);
  fit.r_squared = r_squared(std::span<const double>(pred.data(), pred.size()),
                            std::span<const double>(targets.data(), targets.size()));
  return fit;
}

double r_squared(std::span<const double> predicted, std::span<const double> observed) {
  if (predicted.size() != observed.size() || observed.empty()) {
    throw std::invalid_argument("r_squared: size mismatch or empty input");
  }
  double mean = 0.0;
  for (double y : observed) mean += y;
  mean /= static_cast<double>(observed.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    ss_res += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
  }
  if (ss_tot == 0.0) {
    return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  }
  return 1.0 - ss_res / ss_tot;
}

double quad_abs_normal_mean(double m, double s) {
  if (!(s > 0.0)) throw std::domain_error("quad_abs_normal_mean requires s > 0");
  using boost::math::quadrature::gauss_kronrod;
  // Integrate |m + s u| phi(u) over u; the density is zero to double precision
  // outside [-40, 40], and the kink at u0 = -m/s is placed on a panel edge.
  constexpr double kCut = 40.0;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto phi = [&](double u) { return inv_sqrt_2pi * std::exp(-0.5 * u * u); };
  auto upper = [&](double u) { return (m + s * u) * phi(u); };
  auto lower = [&](double u) { return -(m + s * u) * phi(u); };

  const double u0 = std::clamp(-m / s, -kCut, kCut);
  constexpr unsigned kDepth = 20;
  constexpr double kTol = 1e-13;
  double result = 0.0;
  if (u0 < kCut) result += gauss_kronrod<double, 31>::integrate(upper, u0, kCut, kDepth, kTol);
  if (u0 > -kCut) result += gauss_kronrod<double, 31>::integrate(lower, -kCut, u0, kDepth, kTol);
  return result;
}

}  // namespace energy_lab
