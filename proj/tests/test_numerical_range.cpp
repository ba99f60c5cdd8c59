#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "spectral_lab/numerical_range.hpp"

using namespace spectral_lab;

namespace {

Matrix nilpotent2() {
  Matrix n = Matrix::Zero(2, 2);
  n(0, 1) = 1.0;
  return n;
}

Matrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_CASE("support value examples") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  CHECK(support_value(MatrixOperator(d), 0.0) == doctest::Approx(3.0));
  for (double theta : {0.0, 0.7, 2.0, -1.3})
    CHECK(support_value(MatrixOperator(nilpotent2()), theta) == doctest::Approx(0.5));
  CHECK(std::abs(support_value(MatrixOperator(Matrix::Ones(1, 1)), kPi / 2)) < 1e-15);
}

TEST_CASE("numerical range boundary examples") {
  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1.0;
  for (Complex z : numrange_boundary(MatrixOperator(d), 8)) {
    CHECK(std::abs(z.imag()) < 1e-14);
    CHECK(z.real() >= -1e-14);
    CHECK(z.real() <= 1.0 + 1e-14);
  }
  for (Complex z : numrange_boundary(MatrixOperator(nilpotent2()), 64))
    CHECK(std::abs(std::abs(z) - 0.5) < 1e-10);
  for (Complex z : numrange_boundary(MatrixOperator(Matrix::Ones(1, 1)), 8))
    CHECK(std::abs(z - 1.0) < 1e-15);
  CHECK_THROWS_AS(numrange_boundary(MatrixOperator(d), 4), Error);
}

TEST_CASE("certificate examples") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const ContainmentCertificate c = certify_containment(MatrixOperator(d), ConvexDomain::half_plane());
  CHECK(c.contained);
  CHECK(c.margin == doctest::Approx(1.0));

  const ContainmentCertificate neg =
      certify_containment(MatrixOperator(-Matrix::Ones(1, 1)), ConvexDomain::half_plane());
  CHECK_FALSE(neg.contained);
  CHECK(neg.margin < 0.0);
}

TEST_CASE("certificate margin of a small disc against brute force") {
  // The disc |z - 3| <= 0.05 sits strictly inside Hyperbola(1, 1).
  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const Matrix a = 3.0 * Matrix::Identity(2, 2) + 0.1 * nilpotent2();
  const ContainmentCertificate c = certify_containment(MatrixOperator(a), hy);
  double brute = INFINITY;
  for (int i = -400000; i <= 400000; ++i)
    brute = std::min(brute, std::abs(hy.boundary_point(i * 1e-5).sigma - 3.0));
  CHECK(c.contained);
  CHECK(c.margin == doctest::Approx(brute - 0.05).epsilon(1e-6));
}

TEST_CASE("matrix operator validation") {
  CHECK_THROWS_AS(MatrixOperator(Matrix::Zero(2, 3)), Error);
  CHECK_THROWS_AS(MatrixOperator(Matrix::Zero(0, 0)), Error);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(MatrixOperator{bad}, Error);
}

TEST_CASE("eigenpairs satisfy the residual bound") {
  std::mt19937_64 rng(3);
  for (int n : {1, 3, 8, 20}) {
    const MatrixOperator a(random_matrix(n, rng));
    const auto [values, vectors] = a.eigenpairs();
    const double scale = a.entries().operatorNorm();
    for (int k = 0; k < n; ++k) {
      const Vector v = vectors.col(k);
      CHECK((a.entries() * v - values[k] * v).norm() <= 1e-10 * scale * v.norm());
    }
  }
}

TEST_CASE("generator examples") {
  const MatrixOperator one =
      random_matrix_in_domain(ConvexDomain::half_plane(), 1, 1.0, 7);
  CHECK(one.n() == 1);
  CHECK(one.entries()(0, 0).real() >= 1.0 - 1e-12);

  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const MatrixOperator a = random_matrix_in_domain(hy, 8, 0.1, 1);
  const double margin = certify_containment(a, hy).margin;
  CHECK(margin >= 0.1);
  CHECK(margin <= 0.2);

  const ConvexDomain pa = ConvexDomain::parabola(1.0);
  const MatrixOperator nm = random_matrix_in_domain(pa, 4, 0.1, 3, EnsembleKind::Normal);
  CHECK(nm.is_normal());
  for (Complex lam : nm.eigenvalues()) {
    CHECK(lam.real() > lam.imag() * lam.imag() / 4.0);
    CHECK(pa.nearest(lam).distance >= 0.1 - 1e-9);
  }
}

TEST_CASE("generator rejects bad arguments") {
  CHECK_THROWS_AS(random_matrix_in_domain(ConvexDomain::half_plane(), 0, 0.1, 1), Error);
  CHECK_THROWS_AS(random_matrix_in_domain(ConvexDomain::half_plane(), 3, 0.0, 1), Error);
}

TEST_CASE("property: support function is convex in angle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixOperator a(random_matrix(5, rng));
    for (int k = 0; k < 20; ++k) {
      const double t1 = 2.0 * kPi * u(rng);
      const double span = 0.05 + 3.0 * u(rng);
      const double t2 = t1 + span;
      const double t = t1 + span * u(rng);
      const double rhs = (std::sin(t2 - t) * a.support(t1) + std::sin(t - t1) * a.support(t2)) /
                         std::sin(t2 - t1);
      CHECK(a.support(t) <= rhs + 1e-10);
    }
  }
}

TEST_CASE("property: boundary samples are dominated by every support line") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixOperator a(random_matrix(6, rng));
    const int n_angles = 64;
    const std::vector<Complex> pts = numrange_boundary(a, n_angles);
    for (int j = 0; j < n_angles; ++j) {
      const double theta = 2.0 * kPi * j / n_angles;
      const double h = support_value(a, theta);
      for (Complex z : pts) CHECK((std::exp(Complex(0, -theta)) * z).real() <= h + 1e-10);
    }
  }
}

TEST_CASE("property: normal matrices have the eigenvalue hull as numerical range") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix g = random_matrix(5, rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
    const Vector lam = random_matrix(5, rng).col(0);
    const MatrixOperator a(q * lam.asDiagonal() * q.adjoint());
    // A point is in the hull iff it is below the hull's support function in every direction.
    for (Complex z : numrange_boundary(a, 64))
      for (int j = 0; j < 360; ++j) {
        const Complex dir = std::exp(Complex(0, 2.0 * kPi * j / 360));
        double h = -INFINITY;
        for (int k = 0; k < 5; ++k) h = std::max(h, (std::conj(dir) * lam(k)).real());
        CHECK((std::conj(dir) * z).real() <= h + 1e-10);
      }
  }
}

TEST_CASE("property: half-plane certificate matches the Hermitian part") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> shift(-1.5, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(4, rng) + shift(rng) * Matrix::Identity(4, 4);
    const Matrix h = 0.5 * (a + a.adjoint());
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues()(0);
    const ContainmentCertificate c = certify_containment(MatrixOperator(a), ConvexDomain::half_plane());
    CHECK(c.contained == (lmin > 0.0));
    CHECK(c.hermitian_min == doctest::Approx(lmin).epsilon(1e-12));
  }
}

TEST_CASE("property: generator is deterministic in its seed") {
  const ConvexDomain domains[] = {ConvexDomain::half_plane(), ConvexDomain::hyperbola(1.0, 1.0),
                                  ConvexDomain::parabola(1.0)};
  for (const ConvexDomain& d : domains)
    for (EnsembleKind k : {EnsembleKind::Ginibre, EnsembleKind::Jordan, EnsembleKind::Normal}) {
      const Matrix a = random_matrix_in_domain(d, 5, 0.1, 99, k).entries();
      const Matrix b = random_matrix_in_domain(d, 5, 0.1, 99, k).entries();
      CHECK(a == b);
      CHECK(certify_containment(MatrixOperator(a), d).margin >= 0.1);
    }
}
