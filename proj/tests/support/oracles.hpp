// Independent reference implementations used only by the tests.
#ifndef ENERGY_LAB_TESTS_ORACLES_HPP_
#define ENERGY_LAB_TESTS_ORACLES_HPP_

#include "energy_lab/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

namespace oracle {

using energy_lab::Matrix;
using energy_lab::RowMatrix;
using energy_lab::Vector;

// Integral over the circle by the trapezoid rule, exact for trigonometric
// polynomials of degree below n.
inline double circle_integral(const std::function<double(double, double)>& f, int n = 64) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    s += f(std::cos(t), std::sin(t));
  }
  return s * 2.0 * std::numbers::pi / n;
}

// Integral over S^2: Gauss-Legendre in z = cos(polar), trapezoid in azimuth.
// Exact for polynomials of total degree < 2 * 20 (in z) and < 32 (azimuth).
inline double sphere2_integral(const std::function<double(double, double, double)>& f) {
  constexpr int kAzimuth = 32;
  double s = 0.0;
  for (int k = 0; k < kAzimuth; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / kAzimuth;
    s += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double z) {
          const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
          return f(r * std::cos(phi), r * std::sin(phi), z);
        },
        -1.0, 1.0);
  }
  return s * 2.0 * std::numbers::pi / kAzimuth;
}

// Sparse polynomial in theta_1..theta_d, integrated over the sphere term by
// term with the monomial formula.
class Polynomial {
 public:
  explicit Polynomial(int d) : d_(d) {}

  static Polynomial constant(int d, double c) {
    Polynomial p(d);
    p.terms_[std::vector<int>(d, 0)] = c;
    return p;
  }
  static Polynomial linear(const Vector& a) {
    Polynomial p(static_cast<int>(a.size()));
    for (int i = 0; i < a.size(); ++i) p.add_monomial({i}, a[i]);
    return p;
  }
  static Polynomial quadratic(const Matrix& q) {
    Polynomial p(static_cast<int>(q.rows()));
    for (int i = 0; i < q.rows(); ++i)
      for (int j = 0; j < q.cols(); ++j) p.add_monomial({i, j}, q(i, j));
    return p;
  }
  static Polynomial cubic(const energy_lab::Tensor3& t) {
    Polynomial p(t.dim());
    for (int i = 0; i < t.dim(); ++i)
      for (int j = 0; j < t.dim(); ++j)
        for (int k = 0; k < t.dim(); ++k) p.add_monomial({i, j, k}, t(i, j, k));
    return p;
  }

  void add_monomial(std::initializer_list<int> indices, double c) {
    if (c == 0.0) return;
    std::vector<int> e(d_, 0);
    for (int i : indices) ++e[i];
    terms_[e] += c;
  }

  Polynomial operator*(const Polynomial& o) const {
    Polynomial r(d_);
    for (const auto& [ea, ca] : terms_) {
      for (const auto& [eb, cb] : o.terms_) {
        std::vector<int> e(d_);
        for (int i = 0; i < d_; ++i) e[i] = ea[i] + eb[i];
        r.terms_[e] += ca * cb;
      }
    }
    return r;
  }
  Polynomial operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.terms_[e] += c;
    return r;
  }
  Polynomial scaled(double s) const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_) c *= s;
    return r;
  }

  double sphere_integral() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += c * energy_lab::sphere_monomial_integral(e);
    return s;
  }

 private:
  int d_;
  std::map<std::vector<int>, double> terms_;
};

// Plain double loops over all pairs.
inline double mean_cross_distance(const RowMatrix& a, const RowMatrix& b) {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) s += (a.row(i) - b.row(j)).norm();
  return static_cast<double>(s / (static_cast<long double>(a.rows()) * b.rows()));
}

inline double mean_within_distance(const RowMatrix& a, bool exclude_self) {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.rows(); ++j) s += (a.row(i) - a.row(j)).norm();
  const long double n = static_cast<long double>(a.rows());
  return static_cast<double>(s / (exclude_self ? n * (n - 1) : n * n));
}

inline double energy_distance_bruteforce(const RowMatrix& x, const RowMatrix& y,
                                         bool exclude_self) {
  return mean_cross_distance(x, y) - 0.5 * mean_within_distance(x, exclude_self) -
         0.5 * mean_within_distance(y, exclude_self);
}

// E|Z| for Z ~ N(m, s^2) in closed form.
inline double abs_normal_mean(double m, double s) {
  return s * std::sqrt(2.0 / std::numbers::pi) * std::exp(-m * m / (2 * s * s)) +
         m * std::erf(m / (s * std::sqrt(2.0)));
}

// Cosine similarity of the eigenvalue gradients of 2|D|_F^2 + Tr(D)^2 and |D|_F^2.
inline double eigen_gradient_similarity(const Matrix& delta) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(delta);
  const Vector lam = es.eigenvalues();
  const Vector grad_ideal = 2.0 * lam;
  const Vector grad_loss = 4.0 * lam + Vector::Constant(lam.size(), 2.0 * lam.sum());
  return grad_loss.dot(grad_ideal) / (grad_loss.norm() * grad_ideal.norm());
}

}  // namespace oracle

#endif  // ENERGY_LAB_TESTS_ORACLES_HPP_
