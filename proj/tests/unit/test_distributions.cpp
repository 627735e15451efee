#include "energy_lab/distributions.hpp"
#include "energy_lab/moments.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace energy_lab;

namespace {

Matrix sample_cov(const RowMatrix& x) {
  const RowMatrix c = x.rowwise() - x.colwise().mean();
  return (c.transpose() * c) / static_cast<double>(x.rows() - 1);
}

}  // namespace

TEST_CASE("standard Gaussian sample moments") {
  const int d = 4;
  const Eigen::Index n = 100000;
  const auto s = sample(make_spec(Gaussian{}, Vector::Zero(d), Matrix::Identity(d, d)), n, 5);
  CHECK(s.rows() == n);
  CHECK(s.dim() == d);
  const Vector mean = s.data.colwise().mean();
  for (int i = 0; i < d; ++i) CHECK(std::abs(mean[i]) < 4.0 / std::sqrt(static_cast<double>(n)));
  const Matrix id = Matrix::Identity(d, d);
  CHECK((sample_cov(s.data) - id).norm() < 0.05 * id.norm());
}

TEST_CASE("multivariate t covariance is dof/(dof-2) times the scale") {
  const int d = 3;
  const auto s = sample(make_spec(MultivariateT{5}, Vector::Zero(d), Matrix::Identity(d, d)), 1000000, 6);
  const Matrix want = (5.0 / 3.0) * Matrix::Identity(d, d);
  CHECK((sample_cov(s.data) - want).norm() < 0.05 * want.norm());
}

TEST_CASE("multivariate t uses one divisor per row") {
  // With an identity scale, the ratio of two coordinates of a row is the
  // ratio of the underlying Gaussians, so it is unaffected by the divisor.
  const int d = 2;
  const auto spec_t = make_spec(MultivariateT{3}, Vector::Zero(d), Matrix::Identity(d, d));
  const auto t = sample(spec_t, 2000, 8);
  // Row norms are heavy tailed; coordinates within a row share the scale, so
  // |x_0| and |x_1| are positively correlated.
  const Eigen::ArrayXd a = t.data.col(0).array().abs();
  const Eigen::ArrayXd b = t.data.col(1).array().abs();
  const double corr = ((a - a.mean()) * (b - b.mean())).mean() /
                      std::sqrt((a - a.mean()).square().mean() * (b - b.mean()).square().mean());
  CHECK(corr > 0.1);
}

TEST_CASE("zero skew sinh-arcsinh reproduces the Gaussian draws") {
  const int d = 3;
  Matrix c = Matrix::Identity(d, d);
  c(0, 1) = c(1, 0) = 0.3;
  const Vector mean = Vector::LinSpaced(d, -1.0, 1.0);
  const auto g = sample(make_spec(Gaussian{}, mean, c), 500, 9);
  const auto s = sample(make_spec(SinhArcsinhSkew{0.0}, mean, c), 500, 9);
  CHECK((g.data - s.data).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sampling is deterministic per seed") {
  const auto spec = make_spec(ExpScale{0.5}, Vector::Zero(3), Matrix::Identity(3, 3));
  const auto a = sample(spec, 100, 42);
  const auto b = sample(spec, 100, 42);
  CHECK(a.data == b.data);
  CHECK(a.seed == 42);
  CHECK(a.spec_digest == spec.digest());
  const auto c = sample(spec, 100, 43);
  CHECK(a.data != c.data);
}

TEST_CASE("streamed rows equal a single draw") {
  const auto spec = make_spec(MultivariateT{4}, Vector::Ones(2), Matrix::Identity(2, 2));
  SampleStream stream(spec, 77);
  RowMatrix first = stream.next(30);
  RowMatrix second = stream.next(20);
  const auto whole = sample(spec, 50, 77);
  CHECK(whole.data.topRows(30) == first);
  CHECK(whole.data.bottomRows(20) == second);
}

TEST_CASE("samples with distinct seeds are uncorrelated") {
  const int n = 20000;
  const auto spec = make_spec(Gaussian{}, Vector::Zero(1), Matrix::Identity(1, 1));
  const auto a = sample(spec, n, 1);
  const auto b = sample(spec, n, 2);
  const Eigen::ArrayXd x = a.data.col(0).array() - a.data.col(0).mean();
  const Eigen::ArrayXd y = b.data.col(0).array() - b.data.col(0).mean();
  const double r = (x * y).sum() / std::sqrt(x.square().sum() * y.square().sum());
  CHECK(std::abs(r) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("exp-scale samples are positive") {
  const auto s = sample(make_spec(ExpScale{1.25}, Vector::Constant(3, -2.0), Matrix::Identity(3, 3)),
                        5000, 3);
  CHECK(s.data.minCoeff() > 0.0);
}

TEST_CASE("sinh-arcsinh preserves the order of draws in each coordinate") {
  const int d = 2;
  const auto g = sample(make_spec(Gaussian{}, Vector::Zero(d), Matrix::Identity(d, d)), 400, 4);
  const auto s = sample(make_spec(SinhArcsinhSkew{0.2}, Vector::Zero(d), Matrix::Identity(d, d)), 400, 4);
  for (int c = 0; c < d; ++c) {
    std::vector<int> ig(400);
    std::vector<int> is(400);
    std::iota(ig.begin(), ig.end(), 0);
    std::iota(is.begin(), is.end(), 0);
    std::sort(ig.begin(), ig.end(), [&](int a, int b) { return g.data(a, c) < g.data(b, c); });
    std::sort(is.begin(), is.end(), [&](int a, int b) { return s.data(a, c) < s.data(b, c); });
    CHECK(ig == is);
  }
  // The skew tilts mass to the right.
  CHECK(s.data.mean() > g.data.mean());
}

TEST_CASE("spec validation") {
  Matrix not_spd = Matrix::Identity(2, 2);
  not_spd(0, 1) = not_spd(1, 0) = 2.0;
  CHECK_THROWS_AS(make_spec(Gaussian{}, Vector::Zero(2), not_spd), std::domain_error);
  CHECK_THROWS_AS(make_spec(MultivariateT{0.0}, Vector::Zero(2), Matrix::Identity(2, 2)),
                  std::domain_error);
  CHECK_THROWS_AS(make_spec(MultivariateT{-1.0}, Vector::Zero(2), Matrix::Identity(2, 2)),
                  std::domain_error);
  CHECK_THROWS(make_spec(ExpScale{0.0}, Vector::Zero(2), Matrix::Identity(2, 2)));
  CHECK_THROWS(make_spec(Gaussian{}, Vector::Zero(3), Matrix::Identity(2, 2)));
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  CHECK_THROWS(make_spec(Gaussian{}, Vector::Zero(2), asym));
  CHECK_THROWS(sample(make_spec(Gaussian{}, Vector::Zero(2), Matrix::Identity(2, 2)), 0, 1));
  RowMatrix bad(2, 1);
  bad << 1.0, std::nan("");
  CHECK_THROWS(make_sample(bad));
}

TEST_CASE("random covariance with zero closeness is the identity") {
  for (auto kind : {CovarianceKind::Wishart, CovarianceKind::ExpDecay}) {
    CHECK(random_covariance(kind, 8, 0.0, 3) == Matrix::Identity(8, 8));
  }
}

TEST_CASE("random covariances are symmetric positive definite") {
  for (auto kind : {CovarianceKind::Wishart, CovarianceKind::ExpDecay}) {
    for (int d : {2, 5, 16, 33}) {
      for (double c : {0.1, 0.5, 1.0}) {
        const Matrix m = random_covariance(kind, d, c, static_cast<std::uint64_t>(d * 100 + c * 10));
        CHECK(m == m.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
      }
    }
  }
}

TEST_CASE("Wishart covariances keep trace d") {
  const Matrix m = random_covariance(CovarianceKind::Wishart, 16, 0.7, 9);
  CHECK(m.trace() == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("exp-decay blend stays within closeness of the identity") {
  const int d = 16;
  const Matrix k = random_covariance(CovarianceKind::ExpDecay, d, 1.0, 21);
  const Matrix c = random_covariance(CovarianceKind::ExpDecay, d, 0.2, 21);
  const Matrix id = Matrix::Identity(d, d);
  CHECK((c - id).norm() <= 0.2 * (k - id).norm() + 1e-12);
  // Correlation structure: unit diagonal, entries decaying off the diagonal.
  CHECK(k.diagonal().isOnes());
  CHECK(k(0, 1) > k(0, 2));
}

TEST_CASE("banded pair with no perturbation gives identical specs") {
  const auto [x, y] = banded_gaussian_pair(BandedDelta{8, 0.0, 0.0, 2}, 0.0, 2.0);
  CHECK(x.mean == y.mean);
  CHECK(x.base_cov == y.base_cov);
  CHECK(x.base_cov == 4.0 * Matrix::Identity(8, 8));
}

TEST_CASE("banded pair moments") {
  const BandedDelta b{64, 0.3, 0.2, 2};
  const auto [x, y] = banded_gaussian_pair(b, 0.1, 3.0);
  const Matrix delta = x.base_cov - y.base_cov;
  CHECK((delta - b.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(x.mean.isConstant(0.1));
  CHECK(y.mean.isZero());
  const double tr = delta.trace();
  CHECK(tr * tr == doctest::Approx(64.0 * 64.0 * 0.09).epsilon(1e-12));
  // Exact band count against direct summation, and the asymptotic count.
  CHECK(b.frobenius_sq() == doctest::Approx(b.matrix().squaredNorm()).epsilon(1e-12));
  const double asymptotic = 64 * 0.09 + 2.0 * 64 * 2 * 0.04;
  CHECK(std::abs(b.frobenius_sq() - asymptotic) / asymptotic < 0.07);
}

TEST_CASE("banded delta structure and validation") {
  const Matrix m = BandedDelta{6, 1.0, 0.5, 1}.matrix();
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == 0.5);
  CHECK(m(1, 0) == 0.5);
  CHECK(m(0, 2) == 0.0);
  CHECK_THROWS(BandedDelta{4, 1.0, 0.5, 2}.validate());
  CHECK_THROWS(BandedDelta{4, 1.0, 0.5, -1}.validate());
}

TEST_CASE("banded pair rejects non positive definite covariances") {
  try {
    banded_gaussian_pair(BandedDelta{8, 4.0, 0.0, 0}, 0.0, 1.0);
    FAIL("expected an error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
  }
}
