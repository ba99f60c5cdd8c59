#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "spectral_lab/bound_verifier.hpp"

using namespace spectral_lab;

namespace {

const RationalFunction kResolvent = RationalFunction::pole(-1.0);
const RationalFunction kCayley({{-1.0, {-2.0}}}, 1.0);

CampaignDesign small_design() {
  CampaignDesign d;
  d.domains = {ConvexDomain::half_plane(), ConvexDomain::parabola(1.0)};
  d.ensembles = {{EnsembleKind::Ginibre, 3, 2, 0.1}, {EnsembleKind::Normal, 2, 1, 0.1}};
  d.functions = {{"resolvent", kResolvent}, {"cayley", kCayley}};
  d.lemma1_samples = 8;
  d.seed = 5;
  d.regularization = false;
  return d;
}

}  // namespace

TEST_CASE("K(alpha) examples") {
  CHECK(k_of_alpha(kPi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(k_of_alpha(0.0) - (1.0 + std::sqrt(2.0))) <= 1e-15);
  CHECK(k_of_alpha(kPi / 4) == doctest::Approx(0.75 + std::sqrt(17.0) / 4.0).epsilon(1e-15));
  CHECK(k_of_alpha(kPi / 4) == doctest::Approx(1.780776).epsilon(1e-6));
  CHECK_THROWS_AS(k_of_alpha(-0.1), Error);
  CHECK_THROWS_AS(k_of_alpha(2.0), Error);
}

TEST_CASE("quartic residual examples") {
  CHECK(quartic_residual(1.0, kPi / 2) == doctest::Approx(0.0));
  CHECK(std::abs(quartic_residual(1.0 + std::sqrt(2.0), 0.0)) <= 1e-12);
  CHECK(quartic_residual(2.0, kPi / 4) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("property: K is the quartic root and strictly decreasing") {
  double prev = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const double alpha = 0.5 * kPi * i / 99.0;
    const double k = k_of_alpha(alpha);
    CHECK(std::abs(quartic_residual(k, alpha)) <= 1e-12);
    CHECK(k < prev);
    prev = k;
  }
}

TEST_CASE("boundary g examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  for (const RationalFunction& f : {kResolvent, mobius_damp(kCayley, 0.1)}) {
    const Lemma1Result r = verify_lemma1(f, hp, 1e-8, 16);
    CHECK(r.max_g <= 1e-6);
    CHECK(r.margin == doctest::Approx(-r.max_g).epsilon(1e-12));
  }
  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const Lemma1Result zero = verify_lemma1(RationalFunction(), hy, 1e-8);
  CHECK(zero.margin == 1.0 - 2.0 * (kPi / 4) / kPi);
  CHECK(zero.max_g == 0.0);

  const Lemma1Result r = verify_lemma1(kResolvent, hy, 1e-8, 32);
  CHECK(r.margin >= -1e-6);
  // Recompute the maximiser with the refined reference rule.
  const RationalFunction h = kResolvent.scaled(2.0);
  const Complex s0 = hy.boundary_point(r.argmax_param).sigma;
  const Complex focus[] = {s0};
  const std::vector<Complex> poles = pole_locations(h);
  const BoundaryQuadrature ref =
      reference_quadrature(reference_quadrature(build_quadrature(hy, focus, 1e-9, poles)));
  CHECK(std::abs(std::abs(conj_cauchy_g(h, ref, s0, true).value) - r.max_g) <= 1e-7);

  CHECK_THROWS_AS(verify_lemma1(kCayley, hp, 1e-8), Error);
}

TEST_CASE("support margin examples") {
  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const MatrixOperator scalar(Matrix::Constant(1, 1, Complex(2.0, 0.5)));
  const BoundaryQuadrature q = build_matrix_quadrature(hy, matrix_focus(scalar), kResolvent, 1e-8);
  CHECK(verify_lemma2(RationalFunction(), scalar, q) == 1.5);

  const double margin = verify_lemma2(kResolvent, scalar, q);
  const RationalFunction h = kResolvent.scaled(2.0);
  const Complex z = scalar.entries()(0, 0);
  const Complex focus[] = {z};
  const std::vector<Complex> poles = pole_locations(h);
  const Complex s = S_scalar(h, build_quadrature(hy, focus, 1e-9, poles), z).value;
  CHECK(1.5 - margin == doctest::Approx(std::abs(s)).epsilon(1e-7));
  CHECK(std::abs(s) <= 1.5);
}

TEST_CASE("support margin on the half-plane ensemble") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  const int sizes[] = {2, 4, 8, 16, 32};
  const EnsembleKind kinds[] = {EnsembleKind::Ginibre, EnsembleKind::Jordan, EnsembleKind::Normal};
  const RationalFunction h = lemma_normalized(kCayley, hp, 0.1);
  double worst = INFINITY;
  for (int k = 0; k < 100; ++k) {
    const MatrixOperator a = random_matrix_in_domain(hp, sizes[k % 5], 0.1, 1000 + k, kinds[k % 3]);
    const BoundaryQuadrature q = build_matrix_quadrature(hp, matrix_focus(a), h, 1e-8);
    worst = std::min(worst, verify_lemma2(h, a, q));
  }
  CHECK(worst >= -1e-6);
}

TEST_CASE("schwenninger identity examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  const MatrixOperator n = random_matrix_in_domain(hp, 5, 0.1, 8, EnsembleKind::Normal);
  const BoundaryQuadrature qn = build_matrix_quadrature(hp, matrix_focus(n), kResolvent, 1e-8);
  CHECK(verify_schwenninger(RationalFunction(), n, qn) == 0.0);
  CHECK(verify_schwenninger(kResolvent, n, qn) <= 1e-6);

  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const MatrixOperator a = random_matrix_in_domain(hy, 8, 0.1, 9);
  const RationalFunction h = lemma_normalized(kResolvent, hy, 0.1);
  const BoundaryQuadrature q = build_matrix_quadrature(hy, matrix_focus(a), h, 1e-8);
  const double r = verify_schwenninger(h, a, q);
  const double r_ref = verify_schwenninger(h, a, reference_quadrature(reference_quadrature(q)));
  CHECK(r <= 1e-5);
  CHECK(r_ref <= 1e-5);
}

TEST_CASE("main bound examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MatrixOperator a = random_matrix_in_domain(hp, 6, 0.05, seed, EnsembleKind::Jordan);
    CHECK(verify_main_bound(kCayley, a, hp).ratio <= 1.0 + 1e-10);
  }
  const ConvexDomain pa = ConvexDomain::parabola(1.0);
  const MatrixOperator nm = random_matrix_in_domain(pa, 5, 0.1, 4, EnsembleKind::Normal);
  const MainBound mb = verify_main_bound(kResolvent, nm, pa);
  double spec = 0.0;
  for (Complex lam : nm.eigenvalues()) spec = std::max(spec, std::abs(kResolvent(lam)));
  CHECK(mb.ratio == doctest::Approx(spec / sup_norm(kResolvent, pa)).epsilon(1e-10));
  CHECK(mb.ratio <= 1.0 + 1e-12);
  try {
    verify_main_bound(RationalFunction(), nm, pa);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("main bound over a Jordan sweep on the hyperbola") {
  const ConvexDomain hy = ConvexDomain::hyperbola(1.0, 1.0);
  const double k = k_of_alpha(kPi / 4);
  const RationalFunction fns[] = {kResolvent, kCayley, RationalFunction::pole(-1.0, 1.0, 2),
                                  RationalFunction::pole(Complex(-0.2, 1.5))};
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const MatrixOperator a =
        random_matrix_in_domain(hy, 2 + t % 7, 0.02, 5000 + t / 4, EnsembleKind::Jordan);
    worst = std::max(worst, verify_main_bound(fns[t % 4], a, hy).ratio);
  }
  MESSAGE("largest observed ratio on Hyperbola(1,1): ", worst);
  CHECK(worst <= k);
}

TEST_CASE("regularization examples") {
  const ConvexDomain hp = ConvexDomain::half_plane();
  const std::vector<double> eps = dyadic_eps(10);
  const MatrixOperator stiff = stiff_diagonal_matrix();
  const RegularizationResult r = verify_regularization(kResolvent, stiff, hp, eps);
  CHECK(r.slope >= 0.9);
  CHECK(r.slope <= 1.1);
  CHECK(r.apriori_ok);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double exact = 0.0;
    for (double lam : {1.0, 1e3, 1e6}) {
      const double le = lam / (1.0 + eps[i] * lam);
      exact = std::max(exact, std::abs(1.0 / (1.0 + le) - 1.0 / (1.0 + lam)));
    }
    CHECK(r.errors[i] == doctest::Approx(exact).epsilon(1e-9));
    CHECK(r.identity_residual[i] <= 1e-10);
  }

  const MatrixOperator well(random_matrix_in_domain(hp, 5, 0.5, 3).entries());
  CHECK(verify_regularization(kResolvent, well, hp, eps).monotone);

  const double pair[] = {1.0, 0.5};
  const RegularizationResult one =
      verify_regularization(kResolvent, MatrixOperator(Matrix::Ones(1, 1)), hp, pair);
  CHECK(one.errors[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  const RegularizationResult nn = verify_regularization(kResolvent, stiff_nonnormal_matrix(), hp, eps);
  CHECK(nn.slope >= 0.9);
  CHECK(nn.slope <= 1.1);
  CHECK(stiff_diagonal_matrix().entries().cwiseAbs().maxCoeff() == 1e6);
  CHECK(certify_containment(stiff_nonnormal_matrix(), hp).contained);
}

TEST_CASE("property: enlarging the aperture tightens the bounds") {
  const MatrixOperator a = random_matrix_in_domain(ConvexDomain::hyperbola(1.0, 0.5), 5, 0.1, 12);
  double prev1 = INFINITY, prev2 = INFINITY;
  for (double b : {0.5, 1.0, 2.0, 4.0}) {
    const ConvexDomain d = ConvexDomain::hyperbola(1.0, b);
    REQUIRE(certify_containment(a, d).contained);
    const double alpha = d.alpha();
    const double bound1 = 1.0 - 2.0 * alpha / kPi, bound2 = 2.0 - 2.0 * alpha / kPi;
    CHECK(bound1 < prev1);
    CHECK(bound2 < prev2);
    prev1 = bound1;
    prev2 = bound2;
    const RationalFunction h = lemma_normalized(kResolvent, d, 0.1);
    const BoundaryQuadrature q = build_matrix_quadrature(d, matrix_focus(a), h, 1e-8);
    CHECK(verify_lemma2(h, a, q) >= -1e-7);
    CHECK(verify_lemma1(h, d, 1e-8, 16).margin >= -1e-7);
  }
}

TEST_CASE("seeds and unit planning") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(1, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 3) == derive_seed(1, 3));
  CHECK(derive_seed(1, 3) != derive_seed(2, 3));
  const CampaignDesign d = small_design();
  const std::vector<TrialSpec> units = plan_units(d);
  CHECK(units.size() == 6);
  CHECK(units.front().domain_index == 0);
  CHECK(units.back().domain_index == 1);
}

TEST_CASE("violation rule") {
  TrialRecord r;
  r.ratio = 1.0;
  r.lemma1_margin = r.lemma2_margin = 0.0;
  CHECK_FALSE(is_violation(r, 1.0, 1e-7));
  r.lemma1_margin = -2e-7;
  CHECK(is_violation(r, 1.0, 1e-7));
  r.lemma1_margin = 0.0;
  r.ratio = 1.0 + 2e-7;
  CHECK(is_violation(r, 1.0, 1e-7));
  r.ratio = 1.0;
  r.adjoint_residual = 1e-6;
  CHECK(is_violation(r, 1.0, 1e-7));
  r.failed = true;
  CHECK_FALSE(is_violation(r, 1.0, 1e-7));
}

TEST_CASE("thread count resolution") {
  unsetenv("SPECTRAL_LAB_THREADS");
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
  setenv("SPECTRAL_LAB_THREADS", "2", 1);
  CHECK(resolve_threads(8) == 2);
  CHECK(resolve_threads(1) == 1);
  setenv("SPECTRAL_LAB_THREADS", "junk", 1);
  CHECK(resolve_threads(4) == 4);
  unsetenv("SPECTRAL_LAB_THREADS");
}

TEST_CASE("campaign with no domains") {
  CampaignDesign d = small_design();
  d.domains.clear();
  const CampaignReport r = run_campaign(d, 2);
  CHECK(r.overall.trials == 0);
  CHECK(r.overall.violations == 0);
  CHECK(exit_code(r) == 0);
}

TEST_CASE("campaign results do not depend on the thread count") {
  const CampaignDesign d = small_design();
  const CampaignReport one = run_campaign(d, 1);
  const CampaignReport three = run_campaign(d, 3);
  CHECK(one.threads_used == 1);
  CHECK(three.threads_used == 3);
  REQUIRE(one.overall.trials == 12);
  CHECK(one.overall.failures == 0);
  CHECK(one.overall.violations == 0);
  CHECK(exit_code(one) == 0);
  for (std::size_t i = 0; i < one.domains.size(); ++i)
    for (std::size_t k = 0; k < one.domains[i].trials.size(); ++k) {
      const TrialRecord& x = one.domains[i].trials[k];
      const TrialRecord& y = three.domains[i].trials[k];
      CHECK(x.trial_id == y.trial_id);
      CHECK(x.seed == y.seed);
      CHECK(x.ratio == y.ratio);
      CHECK(x.lemma2_margin == y.lemma2_margin);
      CHECK(x.adjoint_residual == y.adjoint_residual);
    }
}

TEST_CASE("campaign records failures and keeps going") {
  CampaignDesign d = small_design();
  d.functions.push_back({"inside", RationalFunction::pole(2.0)});
  const CampaignReport r = run_campaign(d, 2);
  CHECK(r.overall.trials == 18);
  CHECK(r.overall.failures == 6);
  CHECK(exit_code(r) == 2);
  for (const BoundReport& br : r.domains)
    for (const TrialRecord& t : br.trials) {
      if (t.function_id != "inside") continue;
      CHECK(t.failed);
      CHECK_FALSE(t.error.empty());
    }
}

TEST_CASE("exit codes") {
  CampaignReport r;
  CHECK(exit_code(r) == 0);
  r.overall.violations = 1;
  CHECK(exit_code(r) == 1);
  r.overall.failures = 1;
  CHECK(exit_code(r) == 2);
}
