#pragma once

#include <span>
#include <vector>

#include "spectral_lab/common.hpp"
#include "spectral_lab/convex_domain.hpp"
#include "spectral_lab/numerical_range.hpp"
#include "spectral_lab/rational_function.hpp"

namespace spectral_lab {

/// Truncated composite Gauss-Legendre rule on the boundary parameter window
/// [-m, m]. Weights already include the speed factor |σ'(t)|, so Σ w_i h(σ_i)
/// approximates ∫ h ds.
struct BoundaryQuadrature {
  ConvexDomain domain = ConvexDomain::half_plane();
  std::vector<BoundaryPoint> nodes;
  std::vector<double> weights;
  std::vector<double> breaks;  ///< panel endpoints, sorted, spanning [-m, m]
  std::vector<Complex> focus;  ///< points whose tail mass chose m
  std::vector<Complex> refine; ///< extra refinement targets (poles)
  double truncation_m = 0.0;
  double tail_bound = 0.0;
  double target_tol = 0.0;

  std::size_t size() const { return nodes.size(); }
  std::size_t panel_count() const { return breaks.empty() ? 0 : breaks.size() - 1; }
};

inline constexpr double kMaxTruncation = 1e10;
inline constexpr int kNodesPerPanel = 16;

/// Chooses m by doubling until the tail mass bound at every focus point is at
/// most target_tol, then lays panels graded geometrically (factor 2) away from
/// the boundary points nearest to each focus and refine target, and finally
/// bisects any panel on which a scalar proxy of the local singularity is not
/// resolved. Focus points on the boundary become panel endpoints.
BoundaryQuadrature build_quadrature(const ConvexDomain& domain, std::span<const Complex> focus,
                                    double target_tol, std::span<const Complex> refine = {});

/// Estimate of (1/2π)∫ |f(σ)| ‖(σI − A)^{-1}‖ ds over |t| > m, with the
/// resolvent norm replaced by the inverse distance to the focus set.
double cauchy_tail_estimate(const ConvexDomain& domain, std::span<const Complex> focus,
                            const RationalFunction& f, double m);

/// Rule for matrix transforms of f: focus on the eigenvalues and W(A) samples,
/// refinement at the poles of f, and a window long enough for the Cauchy tail
/// to fall below target_tol as well.
BoundaryQuadrature build_matrix_quadrature(const ConvexDomain& domain,
                                           std::span<const Complex> focus,
                                           const RationalFunction& f, double target_tol);

/// Every panel bisected and the window extended to [-2m, 2m]; used as the
/// reference for error estimates.
BoundaryQuadrature reference_quadrature(const BoundaryQuadrature& quad);

template <class T>
struct TransformResult {
  T value;
  double quad_error_estimate = 0.0;
};

/// μ(σ, z) = Im(τ / (σ − z)) / π with τ the unit tangent.
double mu_kernel(const BoundaryPoint& bp, Complex z);
/// Limit of μ(σ(s), σ(t)) as s → t: κ(t) / (2π).
double mu_kernel_diagonal(const ConvexDomain& domain, double t);
/// (τR − conj(τ)R*) / (2πi) with R = (σI − A)^{-1}; Hermitian.
Matrix mu_operator(const BoundaryPoint& bp, const Matrix& a);
Matrix resolvent(Complex sigma, const Matrix& a);

/// Σ w_i μ(node_i, z). For boundary z the rule must have been built with z as
/// a focus point.
double mass(const BoundaryQuadrature& quad, Complex z, bool on_boundary);

/// (1/2πi) ∫ f(σ)(σI − A)^{-1} dσ; f must vanish at infinity.
TransformResult<Matrix> cauchy_f_matrix(const RationalFunction& f, const BoundaryQuadrature& quad,
                                        const MatrixOperator& a);
/// g(z) = C(conj f, z). Interior: the Cauchy integral, cross-checked against
/// ∫ conj(f) μ ds − conj(f(z)). Boundary: ∫ conj(f) μ(σ, σ0) ds.
TransformResult<Complex> conj_cauchy_g(const RationalFunction& f, const BoundaryQuadrature& quad,
                                       Complex z, bool on_boundary);
TransformResult<Matrix> g_matrix(const RationalFunction& f, const BoundaryQuadrature& quad,
                                 const MatrixOperator& a);
/// S(f, z) = ∫ f μ(σ, z) ds.
TransformResult<Complex> S_scalar(const RationalFunction& f, const BoundaryQuadrature& quad,
                                  Complex z);
/// S(f, A) = ∫ f μ(σ, A) ds.
TransformResult<Matrix> S_matrix(const RationalFunction& f, const BoundaryQuadrature& quad,
                                 const MatrixOperator& a);

/// f(A), g(A) and S(f, A) from a single sweep over the nodes, sharing one
/// resolvent per node. The error estimate is the largest spectral-norm change
/// against the reference rule.
struct MatrixTransforms {
  Matrix cauchy_f;
  Matrix g;
  Matrix s;
  double quad_error_estimate = 0.0;
};
MatrixTransforms matrix_transforms(const RationalFunction& f, const BoundaryQuadrature& quad,
                                   const MatrixOperator& a);

/// Focus set for matrix transforms: eigenvalues plus sampled W(A) boundary.
std::vector<Complex> matrix_focus(const MatrixOperator& a, int n_boundary = 32);
/// Pole locations of f (refinement targets).
std::vector<Complex> pole_locations(const RationalFunction& f);

}  // namespace spectral_lab
