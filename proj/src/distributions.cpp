#include "energy_lab/distributions.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstring>

namespace energy_lab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class Fnv1a {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= c[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void value(double x) { bytes(&x, sizeof x); }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

Matrix cholesky_lower(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("base_cov is not positive definite (Cholesky factorization failed)");
  }
  return llt.matrixL();
}

}  // namespace

std::string family_name(const Family& family) {
  return std::visit(Overloaded{[](const Gaussian&) { return std::string("Gaussian"); },
                               [](const MultivariateT&) { return std::string("MultivariateT"); },
                               [](const ExpScale&) { return std::string("ExpScale"); },
                               [](const SinhArcsinhSkew&) {
                                 return std::string("SinhArcsinhSkew");
                               }},
                    family);
}

double family_param(const Family& family) {
  return std::visit(Overloaded{[](const Gaussian&) { return 0.0; },
                               [](const MultivariateT& t) { return t.dof; },
                               [](const ExpScale& e) { return e.sigma; },
                               [](const SinhArcsinhSkew& s) { return s.skew; }},
                    family);
}

int family_id(const Family& family) { return static_cast<int>(family.index()); }

void DistributionSpec::validate() const {
  const auto d = mean.size();
  if (d < 1) throw std::invalid_argument("distribution dimension must be positive");
  if (base_cov.rows() != d || base_cov.cols() != d) {
    throw std::invalid_argument(fmt::format("base_cov is {}x{} but mean has {} entries",
                                            base_cov.rows(), base_cov.cols(), d));
  }
  if (!mean.allFinite() || !base_cov.allFinite()) {
    throw std::invalid_argument("distribution parameters must be finite");
  }
  require_symmetric(base_cov, "base_cov");
  std::visit(Overloaded{[](const Gaussian&) {},
                        [](const MultivariateT& t) {
                          if (!(t.dof > 0.0)) {
                            throw std::domain_error(
                                fmt::format("MultivariateT requires dof > 0, got {}", t.dof));
                          }
                        },
                        [](const ExpScale& e) {
                          if (!(e.sigma > 0.0)) {
                            throw std::domain_error(
                                fmt::format("ExpScale requires sigma > 0, got {}", e.sigma));
                          }
                        },
                        [](const SinhArcsinhSkew& s) {
                          if (!std::isfinite(s.skew)) {
                            throw std::domain_error("SinhArcsinhSkew requires a finite skew");
                          }
                        }},
             family);
  cholesky_lower(base_cov);
}

std::string DistributionSpec::digest() const {
  Fnv1a h;
  const std::string name = family_name(family);
  h.bytes(name.data(), name.size());
  h.value(family_param(family));
  for (Eigen::Index i = 0; i < mean.size(); ++i) h.value(mean[i]);
  for (Eigen::Index j = 0; j < base_cov.cols(); ++j)
    for (Eigen::Index i = 0; i < base_cov.rows(); ++i) h.value(base_cov(i, j));
  return fmt::format("{:016x}", h.digest());
}

DistributionSpec make_spec(Family family, Vector mean, Matrix base_cov) {
  DistributionSpec spec{family, std::move(mean), std::move(base_cov)};
  spec.validate();
  return spec;
}

SampleMatrix make_sample(RowMatrix data, std::uint64_t seed, std::string digest) {
  if (!data.allFinite()) throw std::invalid_argument("sample contains non-finite entries");
  return SampleMatrix{std::move(data), seed, std::move(digest)};
}

SampleStream::SampleStream(const DistributionSpec& spec, std::uint64_t seed)
    : spec_(spec), engine_(seed), normal_(0.0, 1.0) {
  spec_.validate();
  if (const auto* t = std::get_if<MultivariateT>(&spec_.family)) {
    chi2_ = std::chi_squared_distribution<double>(t->dof);
  }
  chol_lower_ = cholesky_lower(spec_.base_cov);
}

RowMatrix SampleStream::next(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("sample size must be positive");
  const int d = spec_.dim();
  const auto* t = std::get_if<MultivariateT>(&spec_.family);

  RowMatrix eps(n, d);
  Vector divisor;
  if (t) divisor.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) eps(r, c) = normal_(engine_);
    if (t) divisor[r] = std::sqrt(chi2_(engine_) / t->dof);
  }

  RowMatrix z = eps * chol_lower_.transpose();
  std::visit(Overloaded{[&](const Gaussian&) { z.rowwise() += spec_.mean.transpose(); },
                        [&](const MultivariateT&) {
                          for (Eigen::Index r = 0; r < n; ++r) z.row(r) /= divisor[r];
                          z.rowwise() += spec_.mean.transpose();
                        },
                        [&](const ExpScale& e) {
                          z.rowwise() += spec_.mean.transpose();
                          z = (e.sigma * z.array()).exp().matrix();
                        },
                        [&](const SinhArcsinhSkew& s) {
                          z.rowwise() += spec_.mean.transpose();
                          z = z.unaryExpr(
                              [&](double v) { return std::sinh(std::asinh(v) + s.skew); });
                        }},
             spec_.family);
  return z;
}

SampleMatrix sample(const DistributionSpec& spec, Eigen::Index n, std::uint64_t seed) {
  SampleStream stream(spec, seed);
  return make_sample(stream.next(n), seed, spec.digest());
}

std::string to_string(CovarianceKind kind) {
  return kind == CovarianceKind::Wishart ? "Wishart" : "ExpDecay";
}

Matrix random_covariance(CovarianceKind kind, int d, double closeness, std::uint64_t seed) {
  if (d < 2) throw std::domain_error("random_covariance requires d >= 2");
  if (!(closeness >= 0.0 && closeness <= 1.0)) {
    throw std::domain_error(fmt::format("closeness must lie in [0, 1], got {}", closeness));
  }
  std::mt19937_64 engine(seed);
  Matrix k(d, d);
  if (kind == CovarianceKind::Wishart) {
    const int m = 2 * d;
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(m, d);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < d; ++c) a(r, c) = normal(engine);
    Matrix w = a.transpose() * a / static_cast<double>(m);
    w = 0.5 * (w + w.transpose()).eval();
    k = w * (static_cast<double>(d) / w.trace());
  } else {
    std::uniform_real_distribution<double> length(1.0, std::max(1.0, 0.25 * d));
    const double ell = length(engine);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) k(i, j) = std::exp(-std::abs(i - j) / ell);
  }
  Matrix c = closeness * k;
  c.diagonal().array() += 1.0 - closeness;
  if (closeness == 0.0) c = Matrix::Identity(d, d);
  return c;
}

void BandedDelta::validate() const {
  if (d < 2) throw std::domain_error("banded Delta requires d >= 2");
  if (M < 0 || 2 * M >= d) {
    throw std::domain_error(fmt::format("banded Delta requires 0 <= 2M < d, got M={} d={}", M, d));
  }
}

Matrix BandedDelta::matrix() const {
  validate();
  Matrix delta = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    delta(i, i) = delta_sq;
    for (int k = 1; k <= M && i + k < d; ++k) {
      delta(i, i + k) = rho_sq;
      delta(i + k, i) = rho_sq;
    }
  }
  return delta;
}

double BandedDelta::frobenius_sq() const {
  validate();
  const double band_entries = static_cast<double>(M) * d - 0.5 * M * (M + 1);
  return d * delta_sq * delta_sq + 2.0 * rho_sq * rho_sq * band_entries;
}

std::pair<DistributionSpec, DistributionSpec> banded_gaussian_pair(const BandedDelta& b,
                                                                   double mu1, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  const Matrix delta = b.matrix();
  const Matrix iso = lambda * lambda * Matrix::Identity(b.d, b.d);
  const Matrix cov_x = iso + 0.5 * delta;
  const Matrix cov_y = iso - 0.5 * delta;
  for (const auto& [cov, label] : {std::pair{&cov_x, "lambda^2 I + Delta/2"},
                                   std::pair{&cov_y, "lambda^2 I - Delta/2"}}) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(*cov, Eigen::EigenvaluesOnly);
    const double min_ev = eig.eigenvalues().minCoeff();
    if (!(min_ev > 0.0)) {
      throw std::domain_error(
          fmt::format("{} is not positive definite: minimum eigenvalue {}", label, min_ev));
    }
  }
  return {make_spec(Gaussian{}, Vector::Constant(b.d, mu1), cov_x),
          make_spec(Gaussian{}, Vector::Zero(b.d), cov_y)};
}

}  // namespace energy_lab
