#include "spectral_lab/convex_domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include <boost/math/tools/minima.hpp>

namespace spectral_lab {

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::HalfPlane: return "halfplane";
    case DomainKind::Hyperbola: return "hyperbola";
    case DomainKind::Parabola: return "parabola";
  }
  return "unknown";
}

namespace {

// Counterclockwise sweep from angle `from` to angle `to`, in [0, 2π).
double ccw_sweep(double from, double to) {
  double d = std::remainder(to - from, 2.0 * kPi);
  if (d < -1e-12) d += 2.0 * kPi;
  return std::max(d, 0.0);
}

}  // namespace

ConvexDomain::ConvexDomain(DomainKind kind, double a, double b, double p)
    : kind_(kind), a_(a), b_(b), p_(p) {
  switch (kind_) {
    case DomainKind::HalfPlane: alpha_ = kPi / 2; break;
    case DomainKind::Hyperbola: alpha_ = std::atan2(b_, a_); break;
    case DomainKind::Parabola: alpha_ = 0.0; break;
  }
  // Fix the orientation so the interior lies to the left of dσ/dt.
  const BoundaryPoint v = raw_point(0.0);
  const double step = 1e-6 * (1.0 + std::abs(v.sigma));
  const Complex left = v.sigma + step * Complex(0, 1) * v.tangent();
  orientation_ = inside(left) ? 1 : -1;
}

ConvexDomain ConvexDomain::half_plane() { return ConvexDomain(DomainKind::HalfPlane, 0, 0, 0); }

ConvexDomain ConvexDomain::hyperbola(double a, double b) {
  if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorKind::InvalidArgument, "hyperbola requires a > 0 and b > 0");
  return ConvexDomain(DomainKind::Hyperbola, a, b, 0);
}

ConvexDomain ConvexDomain::parabola(double p) {
  if (!(p > 0) || !std::isfinite(p))
    throw Error(ErrorKind::InvalidArgument, "parabola requires p > 0");
  return ConvexDomain(DomainKind::Parabola, 0, 0, p);
}

ConvexDomain ConvexDomain::sector_approx(double alpha, double a) {
  if (!(alpha > 0) || !(alpha < kPi / 2))
    throw Error(ErrorKind::InvalidArgument, "sector-approx requires 0 < alpha < pi/2");
  return hyperbola(a, a * std::tan(alpha));
}

BoundaryPoint ConvexDomain::raw_point(double t) const {
  BoundaryPoint bp;
  bp.param = t;
  switch (kind_) {
    case DomainKind::HalfPlane:
      bp.sigma = Complex(0, -t);
      bp.dsigma = Complex(0, -1);
      break;
    case DomainKind::Hyperbola:
      bp.sigma = Complex(a_ * std::cosh(t), -b_ * std::sinh(t));
      bp.dsigma = Complex(a_ * std::sinh(t), -b_ * std::cosh(t));
      break;
    case DomainKind::Parabola:
      bp.sigma = Complex(t * t / (4 * p_), -t);
      bp.dsigma = Complex(t / (2 * p_), -1);
      break;
  }
  bp.speed = std::abs(bp.dsigma);
  return bp;
}

BoundaryPoint ConvexDomain::boundary_point(double t) const {
  if (orientation_ == 1) return raw_point(t);
  BoundaryPoint bp = raw_point(-t);
  bp.param = t;
  bp.dsigma = -bp.dsigma;
  return bp;
}

Complex ConvexDomain::second_derivative(double t) const {
  const double s = orientation_ * t;
  switch (kind_) {
    case DomainKind::HalfPlane: return 0.0;
    case DomainKind::Hyperbola: return Complex(a_ * std::cosh(s), -b_ * std::sinh(s));
    case DomainKind::Parabola: return 1.0 / (2 * p_);
  }
  return 0.0;
}

Complex ConvexDomain::chord(double t, double t0) const {
  const double s = orientation_ * t;
  const double s0 = orientation_ * t0;
  const double half_gap = 0.5 * (s - s0);
  const double half_sum = 0.5 * (s + s0);
  switch (kind_) {
    case DomainKind::HalfPlane: return Complex(0, -(s - s0));
    case DomainKind::Hyperbola: {
      const double sh = 2 * std::sinh(half_gap);
      return Complex(a_ * std::sinh(half_sum) * sh, -b_ * std::cosh(half_sum) * sh);
    }
    case DomainKind::Parabola: return Complex((s - s0) * (s + s0) / (4 * p_), -(s - s0));
  }
  return 0.0;
}

double ConvexDomain::curvature(double t) const {
  const BoundaryPoint bp = boundary_point(t);
  const Complex d2 = second_derivative(t);
  return std::imag(std::conj(bp.dsigma) * d2) / (bp.speed * bp.speed * bp.speed);
}

bool ConvexDomain::inside(Complex z) const {
  const double x = z.real();
  const double y = z.imag();
  switch (kind_) {
    case DomainKind::HalfPlane: return x > 0;
    case DomainKind::Hyperbola: return x > a_ * std::sqrt(1 + (y / b_) * (y / b_));
    case DomainKind::Parabola: return x > y * y / (4 * p_);
  }
  return false;
}

double ConvexDomain::boundary_param(Complex z) const {
  double raw = 0.0;
  switch (kind_) {
    case DomainKind::HalfPlane: raw = -z.imag(); break;
    case DomainKind::Hyperbola: raw = std::asinh(-z.imag() / b_); break;
    case DomainKind::Parabola: raw = -z.imag(); break;
  }
  return orientation_ * raw;
}

bool ConvexDomain::on_boundary(Complex z, double rel_tol) const {
  const Complex s = boundary_point(boundary_param(z)).sigma;
  return std::abs(s - z) <= rel_tol * (1.0 + std::abs(z));
}

ConvexDomain::Nearest ConvexDomain::nearest(Complex z) const {
  if (kind_ == DomainKind::HalfPlane) return {orientation_ * -z.imag(), std::abs(z.real())};

  auto dist2 = [&](double t) { return std::norm(boundary_point(t).sigma - z); };

  // Any nearest point is no farther than the vertex, which bounds |Im σ|.
  const double reach = std::abs(z.imag()) + std::abs(z - boundary_point(0).sigma);
  const double span = kind_ == DomainKind::Hyperbola ? std::asinh(reach / b_) : reach;
  const double limit = span + 1e-3;

  constexpr int kSamples = 400;
  std::vector<double> ts(kSamples + 1);
  std::vector<double> vs(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) {
    ts[i] = -limit + 2 * limit * i / kSamples;
    vs[i] = dist2(ts[i]);
  }

  Nearest best{0.0, std::numeric_limits<double>::infinity()};
  const int bits = std::numeric_limits<double>::digits / 2;
  // Refine every sampled local minimum; there are at most two for conics.
  for (int i = 0; i <= kSamples; ++i) {
    const bool left_ok = i == 0 || vs[i] <= vs[i - 1];
    const bool right_ok = i == kSamples || vs[i] <= vs[i + 1];
    if (!left_ok || !right_ok) continue;
    const double lo = ts[std::max(i - 1, 0)];
    const double hi = ts[std::min(i + 1, kSamples)];
    auto [t, v] = boost::math::tools::brent_find_minima(dist2, lo, hi, bits);
    if (v < best.distance) best = {t, v};
  }
  // The Im-matching candidate is exact for boundary points.
  const double tc = boundary_param(z);
  const double vc = dist2(tc);
  if (vc < best.distance) best = {tc, vc};
  best.distance = std::sqrt(best.distance);
  return best;
}

double ConvexDomain::signed_distance(Complex z) const {
  const double d = nearest(z).distance;
  return inside(z) ? d : -d;
}

bool ConvexDomain::contains(Complex z, double margin) const {
  if (!inside(z)) return false;
  if (margin <= 0) return true;
  return nearest(z).distance >= margin;
}

double ConvexDomain::distance_to_closure(Complex z) const {
  if (inside(z)) return 0.0;
  return nearest(z).distance;
}

Complex ConvexDomain::forward_asymptote() const {
  Complex d;
  switch (kind_) {
    case DomainKind::HalfPlane: d = Complex(0, -1); break;
    case DomainKind::Hyperbola: d = Complex(a_, -b_) / std::hypot(a_, b_); break;
    case DomainKind::Parabola: d = 1.0; break;
  }
  if (orientation_ == -1) d = std::conj(d);
  return d;
}

Complex ConvexDomain::backward_asymptote() const { return std::conj(forward_asymptote()); }

double ConvexDomain::arg_tail_bound(Complex z, double m) const {
  if (!(m > 0)) throw Error(ErrorKind::InvalidArgument, "arg_tail_bound requires m > 0");
  if (!inside(z) && !on_boundary(z, 1e-10))
    throw Error(ErrorKind::Domain, "arg_tail_bound: point outside the closed domain");
  const Complex ahead = boundary_point(m).sigma - z;
  const Complex behind = boundary_point(-m).sigma - z;
  auto finite = [](Complex w) { return std::isfinite(w.real()) && std::isfinite(w.imag()); };
  // Past the overflow of cosh the remaining sweep is below double resolution.
  const double fwd =
      finite(ahead) ? ccw_sweep(std::arg(ahead), std::arg(forward_asymptote())) : 0.0;
  const double bwd =
      finite(behind) ? ccw_sweep(std::arg(backward_asymptote()), std::arg(behind)) : 0.0;
  return (fwd + bwd) / kPi;
}

std::string ConvexDomain::describe() const {
  char buf[128];
  switch (kind_) {
    case DomainKind::HalfPlane: return "halfplane";
    case DomainKind::Hyperbola:
      std::snprintf(buf, sizeof buf, "hyperbola(a=%.17g,b=%.17g)", a_, b_);
      return buf;
    case DomainKind::Parabola:
      std::snprintf(buf, sizeof buf, "parabola(p=%.17g)", p_);
      return buf;
  }
  return "unknown";
}

double expected_mass(const ConvexDomain& d, bool on_boundary) {
  return (on_boundary ? 1.0 : 2.0) - 2.0 * d.alpha() / kPi;
}

}  // namespace spectral_lab
