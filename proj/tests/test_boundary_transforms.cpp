#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spectral_lab/boundary_transforms.hpp"

using namespace spectral_lab;
using boost::math::quadrature::gauss_kronrod;

namespace {

const Complex I(0.0, 1.0);

std::vector<ConvexDomain> families() {
  return {ConvexDomain::half_plane(), ConvexDomain::hyperbola(1.0, 1.0),
          ConvexDomain::parabola(1.0)};
}

BoundaryQuadrature rule_at(const ConvexDomain& d, Complex z, double tol,
                           const RationalFunction* f = nullptr) {
  const Complex focus[] = {z};
  const std::vector<Complex> poles = f ? pole_locations(*f) : std::vector<Complex>{};
  return build_quadrature(d, focus, tol, poles);
}

// Adaptive Gauss-Kronrod over the hyperbola parameter, split at `split`; the
// integrand h(bp) is multiplied by the speed.
Complex hyperbola_integral(const ConvexDomain& d, double split,
                           const std::function<Complex(const BoundaryPoint&)>& h) {
  auto part = [&](auto proj) {
    auto g = [&](double t) {
      const BoundaryPoint bp = d.boundary_point(t);
      return proj(h(bp)) * bp.speed;
    };
    return gauss_kronrod<double, 61>::integrate(g, -40.0, split, 20, 1e-14) +
           gauss_kronrod<double, 61>::integrate(g, split, 40.0, 20, 1e-14);
  };
  return {part([](Complex c) { return c.real(); }), part([](Complex c) { return c.imag(); })};
}

Matrix random_certified(const ConvexDomain& d, int n, std::uint64_t seed,
                        EnsembleKind kind = EnsembleKind::Ginibre) {
  return random_matrix_in_domain(d, n, 0.1, seed, kind).entries();
}

}  // namespace

TEST_CASE("kernel examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  CHECK(mu_kernel(hp.boundary_point(0.0), 1.0) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
  CHECK(std::abs(mu_kernel(hp.boundary_point(0.0), -2.0 * I)) < 1e-16);
  for (double s : {0.3, 1.0, 7.0}) {
    const double up = mu_kernel(hp.boundary_point(s), 1.0);
    CHECK(up == doctest::Approx(mu_kernel(hp.boundary_point(-s), 1.0)).epsilon(1e-15));
    CHECK(up == doctest::Approx(1.0 / (kPi * (1.0 + s * s))).epsilon(1e-14));
  }
  CHECK_THROWS_AS(mu_kernel(hp.boundary_point(0.0), 0.0), Error);
}

TEST_CASE("kernel diagonal is half the curvature over pi") {
  const ConvexDomain pa = ConvexDomain::parabola(1.0);
  const double t0 = 0.7;
  const Complex s0 = pa.boundary_point(t0).sigma;
  const double near = mu_kernel(pa.boundary_point(t0 + 1e-5), s0);
  CHECK(mu_kernel_diagonal(pa, t0) == doctest::Approx(pa.curvature(t0) / (2.0 * kPi)));
  CHECK(near == doctest::Approx(mu_kernel_diagonal(pa, t0)).epsilon(1e-4));
}

TEST_CASE("operator kernel examples") {
  const BoundaryPoint bp = ConvexDomain::half_plane().boundary_point(0.0);
  const Matrix one = mu_operator(bp, Matrix::Ones(1, 1));
  CHECK(std::abs(one(0, 0) - 1.0 / kPi) < 1e-15);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = Complex(2.0, 1.0);
  const Matrix m = mu_operator(bp, d);
  CHECK(std::abs(m(0, 0) - mu_kernel(bp, 1.0)) < 1e-15);
  CHECK(std::abs(m(1, 1) - mu_kernel(bp, Complex(2.0, 1.0))) < 1e-15);
  CHECK(std::abs(m(0, 1)) < 1e-15);

  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const Matrix a = random_certified(hy, 6, 17);
  const Matrix k = mu_operator(hy.boundary_point(0.4), a);
  CHECK((k - k.adjoint()).norm() <= 1e-12 * k.norm());
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(k).eigenvalues()(0) > 0.0);
}

TEST_CASE("quadrature examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  const BoundaryQuadrature q = rule_at(hp, 1.0, 1e-6);
  CHECK(q.truncation_m >= std::tan((kPi - kPi * 1e-6) / 2.0) * 1e-6);
  CHECK(mass(q, 1.0, false) == doctest::Approx(1.0).epsilon(1e-5));

  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  CHECK(std::abs(mass(rule_at(hy, 2.0, 1e-8), 2.0, false) - 1.5) <= 1e-7);

  for (const ConvexDomain& d : families()) {
    const Complex z = d.kind() == DomainKind::HalfPlane ? Complex(0.5, 1.0) : Complex(3.0, 1.0);
    std::size_t prev_nodes = 0;
    double prev_m = 0.0;
    for (double tol = 1e-4; tol >= 1e-9; tol *= 0.5) {
      const BoundaryQuadrature r = rule_at(d, z, tol);
      CHECK(r.truncation_m >= prev_m);
      CHECK(r.size() >= prev_nodes);
      prev_m = r.truncation_m;
      prev_nodes = r.size();
    }
  }
}

TEST_CASE("quadrature errors") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  CHECK_THROWS_AS(build_quadrature(hp, {}, 1e-8), Error);
  const Complex outside[] = {Complex(-1.0, 0.0)};
  CHECK_THROWS_AS(build_quadrature(hp, outside, 1e-8), Error);
  const Complex z[] = {Complex(1.0, 0.0)};
  CHECK_THROWS_AS(build_quadrature(hp, z, 0.0), Error);
  CHECK_THROWS_AS(build_quadrature(hp, z, 2.0), Error);
  // The half-plane tail decays like 2/(pi m): 1e-12 needs m near 6e11.
  try {
    build_quadrature(hp, z, 1e-12);
    FAIL("expected truncation failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Truncation);
  }
}

TEST_CASE("property: rule structure") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const ConvexDomain& d : families())
    for (int k = 0; k < 10; ++k) {
      const BoundaryPoint bp = d.boundary_point(6.0 * (u(rng) - 0.5));
      const Complex z = bp.sigma + I * bp.tangent() * (0.01 + 3.0 * u(rng));
      const double tol = std::pow(10.0, -4.0 - 6.0 * u(rng));
      const BoundaryQuadrature q = rule_at(d, z, tol);
      CHECK(q.tail_bound <= tol);
      CHECK(q.breaks.front() == -q.truncation_m);
      CHECK(q.breaks.back() == q.truncation_m);
      CHECK(q.size() == q.panel_count() * kNodesPerPanel);
      for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(q.weights[i] > 0.0);
        if (i > 0) CHECK(q.nodes[i].param > q.nodes[i - 1].param);
      }
      CHECK(std::abs(mass(q, z, false) - expected_mass(d, false)) <= 10.0 * tol);
    }
}

TEST_CASE("mass examples") {
  CHECK(mass(rule_at(ConvexDomain::half_plane(), 1.0, 1e-8), 1.0, false) ==
        doctest::Approx(1.0).epsilon(1e-7));
  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  CHECK(std::abs(mass(rule_at(hy, 1.0, 1e-8), 1.0, true) - 0.5) <= 1e-7);
  const double oracle =
      hyperbola_integral(hy, 0.0, [&](const BoundaryPoint& bp) {
        const Complex d = hy.chord(bp.param, 0.0);
        return Complex(d == Complex(0.0) ? 0.0 : std::imag(bp.tangent() / d) / kPi, 0.0);
      }).real();
  CHECK(std::abs(oracle - 0.5) <= 1e-9);
  CHECK(std::abs(mass(rule_at(ConvexDomain::parabola(1.0), 2.0, 1e-8), 2.0, false) - 2.0) <= 1e-7);
}

TEST_CASE("property: boundary and interior masses on all families") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double tol = 1e-8;
  for (const ConvexDomain& d : families())
    for (int k = 0; k < 10; ++k) {
      const BoundaryPoint bp = d.boundary_point(u(rng));
      CHECK(std::abs(mass(rule_at(d, bp.sigma, tol), bp.sigma, true) - expected_mass(d, true)) <=
            10.0 * tol);
      const Complex z = bp.sigma + I * bp.tangent() * std::exp(u(rng));
      CHECK(std::abs(mass(rule_at(d, z, tol), z, false) - expected_mass(d, false)) <= 10.0 * tol);
    }
}

TEST_CASE("cauchy transform of f examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  const RationalFunction res = RationalFunction::pole(-1.0);
  const MatrixOperator one(Matrix::Ones(1, 1));
  const BoundaryQuadrature q1 = build_matrix_quadrature(hp, matrix_focus(one), res, 1e-8);
  CHECK(std::abs(cauchy_f_matrix(res, q1, one).value(0, 0) - 0.5) <= 1e-6);

  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  const MatrixOperator a(d);
  const RationalFunction sq = RationalFunction::pole(-1.0, 1.0, 2);
  const Matrix f = cauchy_f_matrix(sq, build_matrix_quadrature(hy, matrix_focus(a), sq, 1e-8), a).value;
  CHECK(std::abs(f(0, 0) - 1.0 / 9.0) <= 1e-7);
  CHECK(std::abs(f(1, 1) - 1.0 / 16.0) <= 1e-7);
  CHECK(std::abs(f(0, 1)) <= 1e-7);

  const RationalFunction cay({{-1.0, {-2.0}}}, 1.0);
  try {
    cauchy_f_matrix(cay, q1, one);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("conjugate transform examples") {
  const RationalFunction res = RationalFunction::pole(-1.0);
  const ConvexDomain hp = ConvexDomain::half_plane();
  for (Complex z : {Complex(1.0), Complex(0.3, 2.0), Complex(5.0, -1.0)})
    CHECK(std::abs(conj_cauchy_g(res, rule_at(hp, z, 1e-8, &res), z, false).value) <= 1e-6);

  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const RationalFunction f({{-0.5, {1.0}}, {-2.0, {0.7}}}, 0.0);
  const Complex z(2.0, 0.8);
  const Complex gz = conj_cauchy_g(f, rule_at(hy, z, 1e-8, &f), z, false).value;
  const Complex gzc = conj_cauchy_g(f, rule_at(hy, std::conj(z), 1e-8, &f), std::conj(z), false).value;
  CHECK(std::abs(gzc - std::conj(gz)) <= 1e-7);

  const Complex g2 = conj_cauchy_g(res, rule_at(hy, 2.0, 1e-8, &res), 2.0, false).value;
  CHECK(std::abs(g2) <= 0.5 + 1e-6);
  const Complex oracle =
      hyperbola_integral(hy, 0.0, [&](const BoundaryPoint& bp) {
        return std::conj(res(bp.sigma)) * mu_kernel(bp, 2.0);
      }) - std::conj(res(2.0));
  CHECK(std::abs(g2 - oracle) <= 1e-9);
}

TEST_CASE("boundary values of g match an independent quadrature") {
  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const RationalFunction res = RationalFunction::pole(-1.0);
  for (double t0 : {0.0, 0.9, -2.5}) {
    const Complex s0 = hy.boundary_point(t0).sigma;
    const Complex g = conj_cauchy_g(res, rule_at(hy, s0, 1e-9, &res), s0, true).value;
    const Complex oracle = hyperbola_integral(hy, t0, [&](const BoundaryPoint& bp) {
      const Complex d = hy.chord(bp.param, t0);
      const double mu = d == Complex(0.0) ? mu_kernel_diagonal(hy, t0)
                                          : std::imag(bp.tangent() / d) / kPi;
      return std::conj(res(bp.sigma)) * mu;
    });
    CHECK(std::abs(g - oracle) <= 1e-8);
    CHECK(std::abs(g) <= 0.5 * 0.5 + 1e-8);
  }
}

TEST_CASE("matrix g examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  const RationalFunction res = RationalFunction::pole(-1.0);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const MatrixOperator a(random_certified(hp, 5, seed));
    const BoundaryQuadrature q = build_matrix_quadrature(hp, matrix_focus(a), res, 1e-8);
    CHECK(norm2(g_matrix(res, q, a).value) <= 1e-6);
  }

  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = Complex(3.0, 1.0);
  const MatrixOperator a(d);
  const Matrix g = g_matrix(res, build_matrix_quadrature(hy, matrix_focus(a), res, 1e-9), a).value;
  for (int i = 0; i < 2; ++i) {
    const Complex z = d(i, i);
    CHECK(std::abs(g(i, i) - conj_cauchy_g(res, rule_at(hy, z, 1e-9, &res), z, false).value) <= 1e-7);
  }
  CHECK(std::abs(g(0, 1)) <= 1e-9);
}

TEST_CASE("scalar transform examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  const RationalFunction res = RationalFunction::pole(-1.0);
  CHECK(std::abs(S_scalar(res, rule_at(hp, 1.0, 1e-8, &res), 1.0).value - 0.5) <= 1e-6);
  CHECK(std::abs(S_scalar(RationalFunction(), rule_at(hp, 1.0, 1e-8), 1.0).value) == 0.0);

  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const BoundaryQuadrature q = rule_at(hy, 2.0, 1e-8, &res);
  const Complex s = S_scalar(res, q, 2.0).value;
  const Complex g = conj_cauchy_g(res, q, 2.0, false).value;
  CHECK(std::abs(s - res(2.0) - std::conj(g)) <= 1e-6);
  const Complex s_oracle = hyperbola_integral(hy, 0.0, [&](const BoundaryPoint& bp) {
    return res(bp.sigma) * mu_kernel(bp, 2.0);
  });
  CHECK(std::abs(s - s_oracle) <= 1e-8);
}

TEST_CASE("matrix transform examples") {
  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const RationalFunction res = RationalFunction::pole(-1.0);
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = Complex(3.0, 1.0);
  d(2, 2) = Complex(5.0, -2.0);
  const MatrixOperator a(d);
  const Matrix s = S_matrix(res, build_matrix_quadrature(hy, matrix_focus(a), res, 1e-9), a).value;
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(s(i, i) - S_scalar(res, rule_at(hy, d(i, i), 1e-9, &res), d(i, i)).value) <= 1e-7);

  const BoundaryQuadrature q0 = build_matrix_quadrature(hy, matrix_focus(a), res, 1e-8);
  CHECK(norm2(S_matrix(RationalFunction(), q0, a).value) == 0.0);

  const ConvexDomain hp = ConvexDomain::half_plane();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MatrixOperator m(random_certified(hp, 6, seed));
    const RationalFunction cay = mobius_damp(RationalFunction({{-1.0, {-2.0}}}, 1.0), 0.1);
    const RationalFunction h = cay.scaled(1.0 / sup_norm(cay, hp));
    const BoundaryQuadrature q = build_matrix_quadrature(hp, matrix_focus(m), h, 1e-8);
    CHECK(norm2(S_matrix(h, q, m).value) <= 1.0 + 1e-6);
  }
}

TEST_CASE("property: kernel positivity") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const ConvexDomain& d : families())
    for (int k = 0; k < 10000; ++k) {
      const BoundaryPoint node = d.boundary_point(std::sinh(8.0 * (u(rng) - 0.5)));
      const BoundaryPoint base = d.boundary_point(std::sinh(6.0 * (u(rng) - 0.5)));
      const Complex z = base.sigma + I * base.tangent() * (1e-3 + 5.0 * u(rng));
      CHECK(mu_kernel(node, z) > 0.0);
    }
}

TEST_CASE("property: operator kernel is Hermitian positive definite") {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (const ConvexDomain& d : families()) {
    const Matrix a = random_certified(d, 5, 77);
    for (int k = 0; k < 1000; ++k) {
      const Matrix m = mu_operator(d.boundary_point(u(rng)), a);
      CHECK((m - m.adjoint()).norm() <= 1e-12 * m.norm());
      CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues()(0) > 0.0);
    }
  }
}

TEST_CASE("property: scalar identity") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tol = 1e-8;
  for (const ConvexDomain& d : families())
    for (int k = 0; k < 100; ++k) {
      const RationalFunction f = RationalFunction::pole(Complex(-0.2 - 2.0 * u(rng), 4.0 * u(rng) - 2.0),
                                                        Complex(u(rng), u(rng)), 1 + k % 2);
      const BoundaryPoint bp = d.boundary_point(6.0 * (u(rng) - 0.5));
      const Complex z = bp.sigma + I * bp.tangent() * (0.05 + 3.0 * u(rng));
      const BoundaryQuadrature q = rule_at(d, z, tol, &f);
      const Complex s = S_scalar(f, q, z).value;
      const Complex g = conj_cauchy_g(f, q, z, false).value;
      CHECK(std::abs(s - f(z) - std::conj(g)) <= 10.0 * tol);
    }
}

TEST_CASE("property: adjoint identity and oracle equivalence") {
  const double tol = 1e-8;
  std::uint64_t seed = 300;
  for (const ConvexDomain& d : families())
    for (EnsembleKind kind : {EnsembleKind::Ginibre, EnsembleKind::Jordan, EnsembleKind::Normal}) {
      const MatrixOperator a(random_certified(d, 6, ++seed, kind));
      const RationalFunction f({{-1.0, {0.0, 1.0}}, {Complex(-0.5, 1.0), {I}}}, 0.0);
      const BoundaryQuadrature q = build_matrix_quadrature(d, matrix_focus(a), f, tol);
      const MatrixTransforms t = matrix_transforms(f, q, a);
      const Matrix fa = eval_matrix_direct(f, a);
      CHECK(norm2(t.s.adjoint() - fa.adjoint() - t.g) <= 10.0 * tol);
      CHECK(norm2(t.cauchy_f - fa) <= 1e-6 * norm2(fa));
    }
}

TEST_CASE("property: halving panels shrinks the error at least fourfold") {
  // Three coarse panels on [-36, 36]; each refinement bisects every panel.
  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const Complex z(2.0, 0.3);
  BoundaryQuadrature seed_rule;
  seed_rule.domain = hy;
  seed_rule.focus = {z};
  seed_rule.breaks = {-36.0, -12.0, 12.0, 36.0};
  seed_rule.truncation_m = 36.0;
  std::vector<BoundaryQuadrature> rules{reference_quadrature(seed_rule)};
  for (int k = 0; k < 3; ++k) rules.push_back(reference_quadrature(rules.back()));
  // Exact value of the interior mass at alpha = pi/4.
  for (std::size_t k = 0; k + 1 < rules.size(); ++k) {
    const double coarse = std::abs(mass(rules[k], z, false) - 1.5);
    const double fine = std::abs(mass(rules[k + 1], z, false) - 1.5);
    CHECK(coarse > 1e-12);
    CHECK(fine <= coarse / 4.0);
  }
}
