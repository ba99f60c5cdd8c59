#pragma once

#include <string>

#include "spectral_lab/common.hpp"

namespace spectral_lab {

enum class DomainKind { HalfPlane, Hyperbola, Parabola };

const char* to_string(DomainKind kind);

/// A point of the oriented boundary curve at parameter t. The parameter is
/// the natural one of each curve, not arclength; `speed` is |dσ/dt|.
struct BoundaryPoint {
  double param = 0.0;
  Complex sigma;
  Complex dsigma;
  double speed = 1.0;

  Complex tangent() const { return dsigma / speed; }
};

/// Unbounded smooth convex region in canonical position: a sector of
/// half-angle alpha centred on the positive real axis lies inside, and the
/// region itself lies in the open right half-plane.
///
///   HalfPlane      Re z > 0                       alpha = pi/2
///   Hyperbola(a,b) x > a sqrt(1 + y^2/b^2)        alpha = atan(b/a)
///   Parabola(p)    x > y^2 / (4p)                 alpha = 0
///
/// The boundary runs from the upper asymptote down to the lower one so the
/// domain is on the left of the direction of travel.
class ConvexDomain {
 public:
  static ConvexDomain half_plane();
  static ConvexDomain hyperbola(double a, double b);
  static ConvexDomain parabola(double p);
  /// Smooth stand-in for the sector |arg z| < alpha: Hyperbola(a, a tan alpha).
  static ConvexDomain sector_approx(double alpha, double a = 1e-3);

  DomainKind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double p() const { return p_; }
  double alpha() const { return alpha_; }
  /// +1 when the raw curve formula already keeps the interior on the left.
  int orientation() const { return orientation_; }

  BoundaryPoint boundary_point(double t) const;
  Complex second_derivative(double t) const;
  /// σ(t) − σ(t0) without cancellation for nearby parameters.
  Complex chord(double t, double t0) const;
  /// Signed curvature; positive because the boundary turns towards the interior.
  double curvature(double t) const;

  /// Open-domain membership from the closed-form inequality.
  bool inside(Complex z) const;

  struct Nearest {
    double param = 0.0;
    double distance = 0.0;
  };
  /// Closest boundary point to z (1-D minimisation over the parameter).
  Nearest nearest(Complex z) const;
  /// Distance to the boundary, positive inside, negative outside.
  double signed_distance(Complex z) const;
  bool contains(Complex z, double margin) const;
  /// Euclidean distance from z to the closed domain (0 for points inside).
  double distance_to_closure(Complex z) const;

  /// Parameter of a point known to lie on the boundary (inverse of σ via Im).
  double boundary_param(Complex on_boundary) const;
  bool on_boundary(Complex z, double rel_tol = 1e-12) const;

  /// Unit directions of σ(t) as t -> +inf and t -> -inf.
  Complex forward_asymptote() const;
  Complex backward_asymptote() const;

  /// Upper bound on the harmonic mass ∫ μ(σ(t), z) ds over |t| > m, from the
  /// argument swept between σ(±m) − z and the asymptotic directions.
  double arg_tail_bound(Complex z, double m) const;

  /// Interior turning rate of the tangent per unit parameter, |dθ/dt|.
  double turning_rate(double t) const { return curvature(t) * boundary_point(t).speed; }

  std::string describe() const;

  bool operator==(const ConvexDomain&) const = default;

 private:
  ConvexDomain(DomainKind kind, double a, double b, double p);
  BoundaryPoint raw_point(double t) const;

  DomainKind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  double p_ = 0.0;
  double alpha_ = 0.0;
  int orientation_ = 1;
};

/// Half-angle of the widest sector contained in the domain (a supremum; 0 for
/// the parabola).
inline double aperture(const ConvexDomain& d) { return d.alpha(); }

/// Harmonic mass 2 − 2α/π (interior) or 1 − 2α/π (boundary point).
double expected_mass(const ConvexDomain& d, bool on_boundary);

}  // namespace spectral_lab
