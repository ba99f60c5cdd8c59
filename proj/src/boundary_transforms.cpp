#include "spectral_lab/boundary_transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/LU>
#include <boost/math/quadrature/gauss.hpp>

namespace spectral_lab {

namespace {

struct Rule {
  std::array<double, kNodesPerPanel> x;
  std::array<double, kNodesPerPanel> w;
};

const Rule& gauss_rule() {
  static const Rule rule = [] {
    using GL = boost::math::quadrature::gauss<double, kNodesPerPanel>;
    const auto& a = GL::abscissa();
    const auto& w = GL::weights();
    Rule r{};
    const std::size_t half = a.size();
    for (std::size_t i = 0; i < half; ++i) {
      r.x[half - 1 - i] = -a[i];
      r.w[half - 1 - i] = w[i];
      r.x[half + i] = a[i];
      r.w[half + i] = w[i];
    }
    return r;
  }();
  return rule;
}

struct Target {
  Complex point;
  double param = 0.0;  // nearest boundary parameter
  double scale = 1.0;  // local panel length in parameter units
  bool boundary = false;
};

Target make_target(const ConvexDomain& domain, Complex z) {
  Target tg;
  tg.point = z;
  if (domain.on_boundary(z)) {
    tg.boundary = true;
    tg.param = domain.boundary_param(z);
    const double turn = domain.turning_rate(tg.param);
    tg.scale = turn > 0 ? std::min(1.0, 0.5 / turn) : 1.0;
    return tg;
  }
  const auto near = domain.nearest(z);
  tg.param = near.param;
  tg.scale = near.distance / domain.boundary_point(near.param).speed;
  tg.scale = std::max(tg.scale, 1e-9 * (1.0 + std::abs(near.param)));
  return tg;
}

// Longest admissible panel in parameter units; the hyperbola grows like e^t.
double panel_cap(const ConvexDomain& d) {
  return d.kind() == DomainKind::Hyperbola ? 4.0 : std::numeric_limits<double>::infinity();
}

std::vector<double> graded_breaks(const ConvexDomain& domain, const std::vector<Target>& targets,
                                  double m) {
  std::vector<double> forced;
  for (const Target& tg : targets)
    if (tg.boundary && tg.param > -m && tg.param < m) forced.push_back(tg.param);
  std::sort(forced.begin(), forced.end());

  const double cap = panel_cap(domain);
  std::vector<double> breaks{-m};
  double a = -m;
  while (a < m) {
    double len = std::min(cap, m - a);
    for (const Target& tg : targets) {
      if (tg.param > a)
        len = std::min(len, std::max(0.5 * (tg.scale + tg.param - a), 0.5 * tg.scale));
      else
        len = std::min(len, tg.scale + (a - tg.param));
    }
    const auto next_forced = std::upper_bound(forced.begin(), forced.end(), a + 1e-14 * (1 + std::abs(a)));
    bool snapped = false;
    if (next_forced != forced.end() && *next_forced <= a + len) {
      len = *next_forced - a;
      snapped = true;
    }
    if (!snapped && m - (a + len) < 0.25 * len) len = m - a;
    a = (len == m - a) ? m : a + len;
    breaks.push_back(a);
  }
  return breaks;
}

// Scalar stand-ins for the singular behaviour near each target: σ'/(σ − z)
// for interior points and poles, its imaginary part for boundary points.
Complex proxy(const ConvexDomain& domain, const Target& tg, const BoundaryPoint& bp) {
  if (tg.boundary) return std::imag(bp.dsigma / domain.chord(bp.param, tg.param));
  return bp.dsigma / (bp.sigma - tg.point);
}

Complex panel_integral(const ConvexDomain& domain, const Target& tg, double a, double b) {
  const Rule& rule = gauss_rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  Complex sum = 0.0;
  for (int i = 0; i < kNodesPerPanel; ++i)
    sum += rule.w[i] * proxy(domain, tg, domain.boundary_point(mid + half * rule.x[i]));
  return sum * half;
}

void refine_panel(const ConvexDomain& domain, const std::vector<Target>& targets, double a,
                  double b, double tol, int depth, std::vector<double>& out) {
  const double c = 0.5 * (a + b);
  bool resolved = true;
  if (depth < 30) {
    for (const Target& tg : targets) {
      const Complex whole = panel_integral(domain, tg, a, b);
      const Complex split = panel_integral(domain, tg, a, c) + panel_integral(domain, tg, c, b);
      if (std::abs(whole - split) > tol) {
        resolved = false;
        break;
      }
    }
  }
  if (resolved) {
    out.push_back(b);
    return;
  }
  refine_panel(domain, targets, a, c, tol, depth + 1, out);
  refine_panel(domain, targets, c, b, tol, depth + 1, out);
}

void fill_nodes(BoundaryQuadrature& q) {
  const Rule& rule = gauss_rule();
  q.nodes.clear();
  q.weights.clear();
  q.nodes.reserve(q.panel_count() * kNodesPerPanel);
  q.weights.reserve(q.panel_count() * kNodesPerPanel);
  for (std::size_t p = 0; p + 1 < q.breaks.size(); ++p) {
    const double a = q.breaks[p];
    const double b = q.breaks[p + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < kNodesPerPanel; ++i) {
      const BoundaryPoint bp = q.domain.boundary_point(mid + half * rule.x[i]);
      q.nodes.push_back(bp);
      q.weights.push_back(rule.w[i] * half * bp.speed);
    }
  }
}

double max_tail(const ConvexDomain& d, std::span<const Complex> focus, double m) {
  double t = 0.0;
  for (const Complex& z : focus) t = std::max(t, d.arg_tail_bound(z, m));
  return t;
}

double truncation_ceiling(const ConvexDomain& d) {
  return d.kind() == DomainKind::Hyperbola ? 300.0 : kMaxTruncation;
}

}  // namespace

namespace {

BoundaryQuadrature build_with_floor(const ConvexDomain& domain, std::span<const Complex> focus,
                                    double target_tol, std::span<const Complex> refine,
                                    const std::function<double(double)>& extra_tail) {
  if (focus.empty()) throw Error(ErrorKind::InvalidArgument, "build_quadrature needs at least one focus point");
  if (!(target_tol >= 1e-12 && target_tol <= 1e-2))
    throw Error(ErrorKind::InvalidArgument, "target_tol must lie in [1e-12, 1e-2]");
  for (const Complex& z : focus)
    if (!domain.inside(z) && !domain.on_boundary(z, 1e-10))
      throw Error(ErrorKind::Domain, "focus point outside the closed domain");

  BoundaryQuadrature q;
  q.domain = domain;
  q.focus.assign(focus.begin(), focus.end());
  q.refine.assign(refine.begin(), refine.end());
  q.target_tol = target_tol;

  const double ceiling = truncation_ceiling(domain);
  double m = 1.0;
  double tail = max_tail(domain, focus, m);
  auto total = [&](double w) { return extra_tail ? std::max(tail, extra_tail(w)) : tail; };
  while (total(m) > target_tol) {
    m *= 2.0;
    if (m > ceiling) throw Error(ErrorKind::Truncation, "truncation window exceeds the admissible maximum");
    tail = max_tail(domain, focus, m);
  }
  q.truncation_m = m;
  q.tail_bound = tail;

  std::vector<Target> targets;
  for (const Complex& z : focus) targets.push_back(make_target(domain, z));
  for (const Complex& p : refine) targets.push_back(make_target(domain, p));

  const std::vector<double> coarse = graded_breaks(domain, targets, m);
  const double proxy_tol = std::max(1e-2 * target_tol, 1e-13);
  q.breaks.push_back(coarse.front());
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i)
    refine_panel(domain, targets, coarse[i], coarse[i + 1], proxy_tol, 0, q.breaks);
  fill_nodes(q);
  return q;
}

}  // namespace

BoundaryQuadrature build_quadrature(const ConvexDomain& domain, std::span<const Complex> focus,
                                    double target_tol, std::span<const Complex> refine) {
  return build_with_floor(domain, focus, target_tol, refine, {});
}

double cauchy_tail_estimate(const ConvexDomain& domain, std::span<const Complex> focus,
                            const RationalFunction& f, double m) {
  double sum = 0.0;
  for (double t : {m, -m}) {
    const Complex s = domain.boundary_point(t).sigma;
    double d = std::numeric_limits<double>::infinity();
    for (const Complex& z : focus) d = std::min(d, std::abs(s - z));
    sum += std::abs(f(s)) * std::abs(s) / d;
  }
  return sum / (2 * kPi);
}

BoundaryQuadrature build_matrix_quadrature(const ConvexDomain& domain,
                                           std::span<const Complex> focus,
                                           const RationalFunction& f, double target_tol) {
  const std::vector<Complex> poles = pole_locations(f);
  return build_with_floor(domain, focus, target_tol, poles, [&](double m) {
    return cauchy_tail_estimate(domain, focus, f, m);
  });
}

BoundaryQuadrature reference_quadrature(const BoundaryQuadrature& quad) {
  BoundaryQuadrature r = quad;
  const double m = quad.truncation_m;
  const double len = std::min(panel_cap(quad.domain), 0.5 * m);
  std::vector<double> outer;  // endpoints in (m, 2m]
  for (double a = m; a < 2 * m;) {
    a = std::min(a + len, 2 * m);
    if (2 * m - a < 1e-12 * m) a = 2 * m;
    outer.push_back(a);
  }
  std::vector<double> breaks;
  for (auto it = outer.rbegin(); it != outer.rend(); ++it) breaks.push_back(-*it);
  breaks.push_back(quad.breaks.front());
  for (std::size_t i = 0; i + 1 < quad.breaks.size(); ++i) {
    breaks.push_back(0.5 * (quad.breaks[i] + quad.breaks[i + 1]));
    breaks.push_back(quad.breaks[i + 1]);
  }
  breaks.insert(breaks.end(), outer.begin(), outer.end());
  r.breaks = std::move(breaks);
  r.truncation_m = 2 * m;
  r.tail_bound = max_tail(quad.domain, quad.focus, 2 * m);
  fill_nodes(r);
  return r;
}

double mu_kernel(const BoundaryPoint& bp, Complex z) {
  const Complex d = bp.sigma - z;
  if (d == Complex(0.0)) throw Error(ErrorKind::Singularity, "mu kernel evaluated at its own boundary point");
  return std::imag(bp.tangent() / d) / kPi;
}

double mu_kernel_diagonal(const ConvexDomain& domain, double t) {
  return domain.curvature(t) / (2 * kPi);
}

Matrix resolvent(Complex sigma, const Matrix& a) {
  const Eigen::Index n = a.rows();
  Eigen::PartialPivLU<Matrix> lu(sigma * Matrix::Identity(n, n) - a);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::Numerical, "singular resolvent at a boundary node");
  return lu.inverse();
}

Matrix mu_operator(const BoundaryPoint& bp, const Matrix& a) {
  const Matrix y = bp.tangent() * resolvent(bp.sigma, a);
  return (y - y.adjoint()) * Complex(0.0, -0.5 / kPi);
}

namespace {

// μ(σ(t), σ(t0)) through the cancellation-free chord.
double mu_on_boundary(const ConvexDomain& domain, const BoundaryPoint& bp, double t0) {
  if (bp.param == t0) throw Error(ErrorKind::Singularity, "quadrature node coincides with the target point");
  return std::imag(bp.tangent() / domain.chord(bp.param, t0)) / kPi;
}

// Kernel values at every node for a target that is either interior or on the boundary.
std::vector<double> kernel_column(const BoundaryQuadrature& q, Complex z, bool on_boundary) {
  std::vector<double> mu(q.size());
  if (on_boundary) {
    const double t0 = q.domain.boundary_param(z);
    for (std::size_t i = 0; i < q.size(); ++i) mu[i] = mu_on_boundary(q.domain, q.nodes[i], t0);
  } else {
    for (std::size_t i = 0; i < q.size(); ++i) mu[i] = mu_kernel(q.nodes[i], z);
  }
  return mu;
}

}  // namespace

double mass(const BoundaryQuadrature& quad, Complex z, bool on_boundary) {
  if (on_boundary && !quad.domain.on_boundary(z, 1e-10))
    throw Error(ErrorKind::Precondition, "mass: point is not on the boundary");
  if (!on_boundary && !quad.domain.inside(z))
    throw Error(ErrorKind::Domain, "mass: point is not inside the domain");
  const std::vector<double> mu = kernel_column(quad, z, on_boundary);
  double sum = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) sum += quad.weights[i] * mu[i];
  return sum;
}

namespace {

void require_vanishing(const RationalFunction& f, const BoundaryQuadrature& quad) {
  if (!f.vanishes_at_infinity())
    throw Error(ErrorKind::Precondition, "transform requires f(infinity) = 0");
  f.require_valid_for(quad.domain);
}

Complex cauchy_conj_sum(const RationalFunction& f, const BoundaryQuadrature& q, Complex z) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const BoundaryPoint& bp = q.nodes[i];
    sum += q.weights[i] * bp.tangent() * std::conj(f(bp.sigma)) / (bp.sigma - z);
  }
  return sum / Complex(0.0, 2 * kPi);
}

Complex conj_mu_sum(const RationalFunction& f, const BoundaryQuadrature& q, Complex z,
                    bool on_boundary) {
  const std::vector<double> mu = kernel_column(q, z, on_boundary);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += q.weights[i] * std::conj(f(q.nodes[i].sigma)) * mu[i];
  return sum;
}

Complex f_mu_sum(const RationalFunction& f, const BoundaryQuadrature& q, Complex z) {
  const std::vector<double> mu = kernel_column(q, z, false);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += q.weights[i] * f(q.nodes[i].sigma) * mu[i];
  return sum;
}

MatrixTransforms sweep(const RationalFunction& f, const BoundaryQuadrature& q, const Matrix& a) {
  const Eigen::Index n = a.rows();
  MatrixTransforms out{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n), 0.0};
  for (std::size_t i = 0; i < q.size(); ++i) {
    const BoundaryPoint& bp = q.nodes[i];
    const Complex fv = f(bp.sigma);
    const Matrix y = (q.weights[i] * bp.tangent()) * resolvent(bp.sigma, a);
    out.cauchy_f += fv * y;
    out.g += std::conj(fv) * y;
    out.s += fv * (y - y.adjoint());
  }
  const Complex inv = 1.0 / Complex(0.0, 2 * kPi);
  out.cauchy_f *= inv;
  out.g *= inv;
  out.s *= inv;
  return out;
}

}  // namespace

MatrixTransforms matrix_transforms(const RationalFunction& f, const BoundaryQuadrature& quad,
                                   const MatrixOperator& a) {
  require_vanishing(f, quad);
  MatrixTransforms out = sweep(f, quad, a.entries());
  const MatrixTransforms ref = sweep(f, reference_quadrature(quad), a.entries());
  out.quad_error_estimate = std::max({norm2(out.cauchy_f - ref.cauchy_f), norm2(out.g - ref.g),
                                      norm2(out.s - ref.s)});
  return out;
}

TransformResult<Matrix> cauchy_f_matrix(const RationalFunction& f, const BoundaryQuadrature& quad,
                                        const MatrixOperator& a) {
  const MatrixTransforms t = matrix_transforms(f, quad, a);
  return {t.cauchy_f, t.quad_error_estimate};
}

TransformResult<Matrix> g_matrix(const RationalFunction& f, const BoundaryQuadrature& quad,
                                 const MatrixOperator& a) {
  const MatrixTransforms t = matrix_transforms(f, quad, a);
  return {t.g, t.quad_error_estimate};
}

TransformResult<Matrix> S_matrix(const RationalFunction& f, const BoundaryQuadrature& quad,
                                 const MatrixOperator& a) {
  const MatrixTransforms t = matrix_transforms(f, quad, a);
  return {t.s, t.quad_error_estimate};
}

TransformResult<Complex> conj_cauchy_g(const RationalFunction& f, const BoundaryQuadrature& quad,
                                       Complex z, bool on_boundary) {
  require_vanishing(f, quad);
  const BoundaryQuadrature ref = reference_quadrature(quad);
  if (on_boundary) {
    if (!quad.domain.on_boundary(z, 1e-10))
      throw Error(ErrorKind::Precondition, "conj_cauchy_g: point is not on the boundary");
    const Complex v = conj_mu_sum(f, quad, z, true);
    return {v, std::abs(v - conj_mu_sum(f, ref, z, true))};
  }
  if (!quad.domain.inside(z)) throw Error(ErrorKind::Domain, "conj_cauchy_g: point outside the domain");
  const Complex cauchy = cauchy_conj_sum(f, quad, z);
  const Complex layer = conj_mu_sum(f, quad, z, false) - std::conj(f(z));
  const double richardson = std::abs(cauchy - cauchy_conj_sum(f, ref, z));
  return {cauchy, std::max(richardson, std::abs(cauchy - layer))};
}

TransformResult<Complex> S_scalar(const RationalFunction& f, const BoundaryQuadrature& quad,
                                  Complex z) {
  require_vanishing(f, quad);
  if (!quad.domain.inside(z)) throw Error(ErrorKind::Domain, "S_scalar: point outside the open domain");
  const Complex v = f_mu_sum(f, quad, z);
  return {v, std::abs(v - f_mu_sum(f, reference_quadrature(quad), z))};
}

std::vector<Complex> matrix_focus(const MatrixOperator& a, int n_boundary) {
  std::vector<Complex> pts = a.eigenvalues();
  const auto ring = numrange_boundary(a, n_boundary);
  pts.insert(pts.end(), ring.begin(), ring.end());
  return pts;
}

std::vector<Complex> pole_locations(const RationalFunction& f) {
  std::vector<Complex> out;
  for (const PoleTerm& p : f.poles()) out.push_back(p.location);
  return out;
}

}  // namespace spectral_lab
