#include "spectral_lab/bound_verifier.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <optional>
#include <thread>

#include <Eigen/LU>

namespace spectral_lab {

double k_of_alpha(double alpha) {
  constexpr double kSlack = 1e-12;
  if (!(alpha >= -kSlack) || !(alpha <= kPi / 2 + kSlack))
    throw Error(ErrorKind::InvalidArgument, "k_of_alpha requires alpha in [0, pi/2]");
  const double r = std::clamp(alpha, 0.0, kPi / 2) / kPi;
  return 1.0 - r + std::sqrt(2.0 - 4.0 * r + r * r);
}

double quartic_residual(double c, double alpha) {
  const double c2 = c * c;
  return c2 * c2 - (2.0 - 2.0 * alpha / kPi) * c2 * c - (1.0 - 2.0 * alpha / kPi) * c2;
}

std::vector<double> lemma1_sample_params(const RationalFunction& f, const ConvexDomain& domain,
                                         int n_samples) {
  if (n_samples < 2) throw Error(ErrorKind::InvalidArgument, "boundary g check needs at least two samples");
  std::vector<double> ts;
  const bool hyperbolic = domain.kind() == DomainKind::Hyperbola;
  for (int k = 0; k < n_samples; ++k) {
    const double u = -1.0 + 2.0 * k / (n_samples - 1);
    ts.push_back(hyperbolic ? 4.0 * u : std::sinh(3.0 * u));
  }
  ts.push_back(0.0);
  for (const PoleTerm& p : f.poles()) ts.push_back(domain.nearest(p.location).param);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

namespace {

Lemma1Result lemma1_for_normalized(const RationalFunction& h, const ConvexDomain& domain,
                                   double target_tol, int n_samples) {
  Lemma1Result out;
  const std::vector<Complex> poles = pole_locations(h);
  for (double t : lemma1_sample_params(h, domain, n_samples)) {
    const Complex s0 = domain.boundary_point(t).sigma;
    const Complex focus[] = {s0};
    const BoundaryQuadrature q = build_quadrature(domain, focus, target_tol, poles);
    const TransformResult<Complex> g = conj_cauchy_g(h, q, s0, true);
    const double mag = std::abs(g.value);
    if (mag > out.max_g) {
      out.max_g = mag;
      out.argmax_param = t;
    }
    out.quad_error = std::max(out.quad_error, g.quad_error_estimate);
  }
  out.margin = 1.0 - 2.0 * domain.alpha() / kPi - out.max_g;
  return out;
}

}  // namespace

RationalFunction lemma_normalized(const RationalFunction& f, const ConvexDomain& domain,
                                  double damping_eps) {
  if (f.is_zero()) throw Error(ErrorKind::Precondition, "function vanishes identically");
  const RationalFunction h = f.vanishes_at_infinity() ? f : mobius_damp(f, damping_eps);
  const double s = sup_norm(h, domain);
  if (!(s > 0)) throw Error(ErrorKind::Precondition, "sup norm is zero");
  return h.scaled(1.0 / s);
}

Lemma1Result verify_lemma1(const RationalFunction& f, const ConvexDomain& domain,
                           double target_tol, int n_samples) {
  if (!f.vanishes_at_infinity())
    throw Error(ErrorKind::Precondition, "boundary g check requires f to vanish at infinity");
  if (f.is_zero()) {
    Lemma1Result out;
    out.margin = 1.0 - 2.0 * domain.alpha() / kPi;
    return out;
  }
  f.require_valid_for(domain);
  return lemma1_for_normalized(f.scaled(1.0 / sup_norm(f, domain)), domain, target_tol, n_samples);
}

double lemma2_margin(const ConvexDomain& domain, const MatrixTransforms& t) {
  return 2.0 - 2.0 * domain.alpha() / kPi - norm2(t.s);
}

double verify_lemma2(const RationalFunction& f, const MatrixOperator& a,
                     const BoundaryQuadrature& quad) {
  const double bound = 2.0 - 2.0 * quad.domain.alpha() / kPi;
  if (f.is_zero()) return bound;
  const RationalFunction h = f.scaled(1.0 / sup_norm(f, quad.domain));
  return lemma2_margin(quad.domain, matrix_transforms(h, quad, a));
}

double schwenninger_residual(const Matrix& f_a, const Matrix& s, const Matrix& g) {
  const Matrix ff = f_a.adjoint() * f_a;
  const Matrix lhs = ff * ff;
  const Matrix rhs = ff * s.adjoint() * f_a - ff * g * f_a;
  const double nf = norm2(f_a);
  return norm2(lhs - rhs) / std::max(1.0, nf * nf * nf * nf);
}

double verify_schwenninger(const RationalFunction& f, const MatrixOperator& a,
                           const BoundaryQuadrature& quad) {
  if (f.is_zero()) return 0.0;
  const MatrixTransforms t = matrix_transforms(f, quad, a);
  return schwenninger_residual(eval_matrix_direct(f, a), t.s, t.g);
}

double adjoint_residual(const Matrix& f_a, const Matrix& s, const Matrix& g) {
  return norm2(s.adjoint() - f_a.adjoint() - g);
}

MainBound verify_main_bound(const RationalFunction& f, const MatrixOperator& a,
                            const ConvexDomain& domain) {
  f.require_valid_for(domain);
  MainBound out;
  out.sup_norm_f = sup_norm(f, domain);
  if (!(out.sup_norm_f > 0)) throw Error(ErrorKind::Precondition, "ratio undefined: sup norm is zero");
  out.norm_fa = norm2(eval_matrix_direct(f, a));
  out.ratio = out.norm_fa / out.sup_norm_f;
  return out;
}

RegularizationResult verify_regularization(const RationalFunction& f, const MatrixOperator& a,
                                           const ConvexDomain& domain,
                                           std::span<const double> eps_list) {
  if (f.poles().size() != 1 || f.poles()[0].order() != 1)
    throw Error(ErrorKind::InvalidArgument, "regularization check needs a single simple pole");
  if (eps_list.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two eps values");
  f.require_valid_for(domain);
  const Complex p = f.poles()[0].location;
  const Complex c = f.poles()[0].coefficients[0];
  const double d = domain.distance_to_closure(p);
  const double factor = 1.0 + std::abs(p) / d;

  const Matrix fa = eval_matrix_direct(f, a);
  const Matrix a_fa = a.entries() * (fa - f.value_at_infinity() * Matrix::Identity(a.n(), a.n()));

  RegularizationResult out;
  for (double eps : eps_list) {
    if (!(eps > 0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
    const MatrixOperator ae = regularize_matrix(a, eps);
    const Matrix fae = eval_matrix_direct(f, ae);
    const Matrix diff = fae - fa;
    const Matrix ae_fae =
        ae.entries() * (fae - f.value_at_infinity() * Matrix::Identity(a.n(), a.n()));
    const Matrix predicted = (eps / c) * ae_fae * a_fa;
    const double e = norm2(diff);
    out.eps.push_back(eps);
    out.errors.push_back(e);
    out.apriori.push_back(eps * factor * factor * std::abs(c));
    out.identity_residual.push_back(norm2(diff - predicted) / std::max(e, 1e-300));
    if (e > out.apriori.back() * (1 + 1e-10)) out.apriori_ok = false;
  }
  for (std::size_t k = 1; k < out.eps.size(); ++k) {
    const bool shrinking = out.eps[k] < out.eps[k - 1];
    if (shrinking && out.errors[k] > out.errors[k - 1]) out.monotone = false;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t k = 0; k < out.eps.size(); ++k) {
    if (!(out.errors[k] > 0)) continue;
    const double x = std::log(out.eps[k]);
    const double y = std::log(out.errors[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++used;
  }
  const double denom = used * sxx - sx * sx;
  if (used < 2 || !(std::abs(denom) > 0))
    throw Error(ErrorKind::Numerical, "regularization errors vanish; slope undefined");
  out.slope = (used * sxy - sx * sy) / denom;
  return out;
}

std::vector<double> dyadic_eps(int count) {
  std::vector<double> eps;
  for (int k = 1; k <= count; ++k) eps.push_back(std::ldexp(1.0, -k));
  return eps;
}

MatrixOperator stiff_diagonal_matrix() {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1e3;
  a(2, 2) = 1e6;
  return MatrixOperator(a);
}

MatrixOperator stiff_nonnormal_matrix(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "non-normal test matrix needs n >= 2");
  Matrix s = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) s(i, i) = std::sqrt(std::pow(1e6, double(i) / (n - 1)));
  Matrix m = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m(i, j) = 0.5;
  return MatrixOperator(s * m * s);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<TrialSpec> plan_units(const CampaignDesign& design) {
  std::vector<TrialSpec> units;
  for (std::size_t d = 0; d < design.domains.size(); ++d)
    for (const EnsembleSpec& e : design.ensembles)
      for (int k = 0; k < e.count; ++k) {
        TrialSpec u;
        u.domain_index = d;
        u.n = e.n;
        u.ensemble = e.kind;
        u.margin = e.margin;
        u.seed = derive_seed(design.seed, units.size());
        units.push_back(u);
      }
  return units;
}

std::vector<TrialRecord> run_unit(const CampaignDesign& design, const TrialSpec& unit) {
  const ConvexDomain& domain = design.domains.at(unit.domain_index);
  std::vector<TrialRecord> out;
  for (const NamedFunction& fn : design.functions) {
    TrialRecord r;
    r.seed = unit.seed;
    r.domain_index = unit.domain_index;
    r.n = unit.n;
    r.ensemble = unit.ensemble;
    r.ensemble_margin = unit.margin;
    r.function_id = fn.id;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.sup_norm_f = r.norm_fa = r.ratio = nan;
    r.lemma1_margin = r.lemma2_margin = nan;
    r.schwenninger_residual = r.adjoint_residual = r.quad_error = nan;
    out.push_back(r);
  }

  std::optional<MatrixOperator> a;
  try {
    a.emplace(random_matrix_in_domain(domain, unit.n, unit.margin, unit.seed, unit.ensemble,
                                      design.n_angles));
  } catch (const std::exception& e) {
    for (TrialRecord& r : out) r.failed = true, r.error = e.what();
    return out;
  }
  const std::vector<Complex> focus = matrix_focus(*a);

  for (std::size_t i = 0; i < design.functions.size(); ++i) {
    TrialRecord& r = out[i];
    try {
      const RationalFunction& f = design.functions[i].f;
      const MainBound mb = verify_main_bound(f, *a, domain);
      r.sup_norm_f = mb.sup_norm_f;
      r.norm_fa = mb.norm_fa;
      r.ratio = mb.ratio;

      const RationalFunction h = lemma_normalized(f, domain, design.damping_eps);
      const BoundaryQuadrature quad = build_matrix_quadrature(domain, focus, h, design.quad_tol);
      const MatrixTransforms t = matrix_transforms(h, quad, *a);
      const Matrix fh = eval_matrix_direct(h, *a);
      r.lemma2_margin = lemma2_margin(domain, t);
      r.schwenninger_residual = schwenninger_residual(fh, t.s, t.g);
      r.adjoint_residual = adjoint_residual(fh, t.s, t.g);

      const Lemma1Result l1 = lemma1_for_normalized(h, domain, design.quad_tol, design.lemma1_samples);
      r.lemma1_margin = l1.margin;
      r.quad_error = std::max({t.quad_error_estimate, norm2(t.cauchy_f - fh), l1.quad_error});
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
    }
  }
  return out;
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPECTRAL_LAB_THREADS")) {
    std::size_t cap = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, cap);
    if (ec == std::errc() && ptr == end && cap > 0) n = std::min(n, cap);
  }
  return n;
}

bool is_violation(const TrialRecord& r, double k_alpha, double tolerance) {
  if (r.failed) return false;
  return r.lemma1_margin < -tolerance || r.lemma2_margin < -tolerance ||
         r.ratio / k_alpha - 1.0 > tolerance || r.schwenninger_residual > tolerance ||
         r.adjoint_residual > tolerance;
}

namespace {

Aggregate empty_aggregate() {
  Aggregate a;
  a.min_margin_lemma1 = std::numeric_limits<double>::infinity();
  a.min_margin_lemma2 = std::numeric_limits<double>::infinity();
  return a;
}

void fold(Aggregate& agg, const TrialRecord& r, double k_alpha, double tolerance) {
  ++agg.trials;
  if (r.failed) {
    ++agg.failures;
    return;
  }
  agg.max_ratio = std::max(agg.max_ratio, r.ratio);
  agg.max_ratio_over_k = std::max(agg.max_ratio_over_k, r.ratio / k_alpha);
  agg.min_margin_lemma1 = std::min(agg.min_margin_lemma1, r.lemma1_margin);
  agg.min_margin_lemma2 = std::min(agg.min_margin_lemma2, r.lemma2_margin);
  agg.max_schwenninger_residual = std::max(agg.max_schwenninger_residual, r.schwenninger_residual);
  agg.max_adjoint_residual = std::max(agg.max_adjoint_residual, r.adjoint_residual);
  agg.max_quad_error = std::max(agg.max_quad_error, r.quad_error);
  if (is_violation(r, k_alpha, tolerance)) ++agg.violations;
}

}  // namespace

CampaignReport run_campaign(const CampaignDesign& design, std::size_t threads) {
  if (!(design.quad_tol >= 1e-12 && design.quad_tol <= 1e-2))
    throw Error(ErrorKind::InvalidArgument, "quadrature tolerance outside [1e-12, 1e-2]");
  const std::vector<TrialSpec> units = plan_units(design);
  std::vector<std::vector<TrialRecord>> results(units.size());

  CampaignReport report;
  report.declared_tolerance = design.slack_factor * design.quad_tol;
  report.threads_used = std::max<std::size_t>(1, std::min(resolve_threads(threads), units.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) results[i] = run_unit(design, units[i]);
  };
  if (report.threads_used == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < report.threads_used; ++k) pool.emplace_back(worker);
  }

  report.overall = empty_aggregate();
  for (const ConvexDomain& d : design.domains) {
    BoundReport br;
    br.domain = d;
    br.alpha = d.alpha();
    br.k_alpha = k_of_alpha(d.alpha());
    br.aggregate = empty_aggregate();
    report.domains.push_back(br);
  }
  std::size_t trial_id = 0;
  for (std::vector<TrialRecord>& unit_records : results)
    for (TrialRecord& r : unit_records) {
      r.trial_id = trial_id++;
      BoundReport& br = report.domains[r.domain_index];
      fold(br.aggregate, r, br.k_alpha, report.declared_tolerance);
      fold(report.overall, r, br.k_alpha, report.declared_tolerance);
      br.trials.push_back(std::move(r));
    }

  if (design.regularization) {
    const RationalFunction f = RationalFunction::pole(-1.0);
    const std::vector<double> eps = dyadic_eps(10);
    const std::pair<const char*, MatrixOperator> cases[] = {
        {"stiff-diagonal", stiff_diagonal_matrix()}, {"stiff-nonnormal", stiff_nonnormal_matrix()}};
    for (const auto& [id, a] : cases) {
      RegularizationSummary s;
      s.matrix_id = id;
      try {
        const RegularizationResult rr =
            verify_regularization(f, a, ConvexDomain::half_plane(), eps);
        s.slope = rr.slope;
        s.apriori_ok = rr.apriori_ok;
        s.max_identity_residual =
            *std::max_element(rr.identity_residual.begin(), rr.identity_residual.end());
        if (s.slope < 0.9 || s.slope > 1.1 || !s.apriori_ok) ++report.overall.violations;
      } catch (const std::exception&) {
        s.apriori_ok = false;
        ++report.overall.failures;
      }
      report.regularization.push_back(s);
    }
  }
  return report;
}

int exit_code(const CampaignReport& report) {
  if (report.overall.failures > 0) return 2;
  return report.overall.violations > 0 ? 1 : 0;
}

}  // namespace spectral_lab
