#pragma once

#include <vector>

#include <json.hpp>

#include "spectral_lab/common.hpp"
#include "spectral_lab/convex_domain.hpp"
#include "spectral_lab/numerical_range.hpp"

namespace spectral_lab {

/// A pole of order `coefficients.size()`; coefficients[j-1] multiplies
/// 1/(z - location)^j.
struct PoleTerm {
  Complex location;
  std::vector<Complex> coefficients;

  int order() const { return static_cast<int>(coefficients.size()); }
  bool operator==(const PoleTerm&) const = default;
};

/// f(z) = value_at_infinity + Σ_k Σ_j c_{k,j} / (z - p_k)^j
class RationalFunction {
 public:
  RationalFunction() = default;
  RationalFunction(std::vector<PoleTerm> poles, Complex value_at_infinity);

  static RationalFunction constant(Complex c);
  /// c / (z - p)^order
  static RationalFunction pole(Complex p, Complex c = 1.0, int order = 1);

  const std::vector<PoleTerm>& poles() const { return poles_; }
  Complex value_at_infinity() const { return inf_; }
  bool vanishes_at_infinity() const { return inf_ == Complex(0.0); }
  bool is_zero() const;

  RationalFunction scaled(Complex s) const;

  Complex operator()(Complex z) const { return eval(z); }
  Complex eval(Complex z) const;

  /// Every pole keeps a distance of at least `min_distance` from the closed domain.
  bool valid_for(const ConvexDomain& domain, double min_distance = 1e-6) const;
  void require_valid_for(const ConvexDomain& domain) const;

  bool operator==(const RationalFunction&) const = default;

 private:
  std::vector<PoleTerm> poles_;
  Complex inf_ = 0.0;
};

/// Partial-fraction realisation f(∞)I + Σ c_{k,j} (A - p_k I)^{-j} with one
/// LU factorisation per pole and repeated solves for higher orders.
Matrix eval_matrix_direct(const RationalFunction& f, const Matrix& a);
inline Matrix eval_matrix_direct(const RationalFunction& f, const MatrixOperator& a) {
  return eval_matrix_direct(f, a.entries());
}

/// U diag(f(λ_i)) U* from the Schur form; only valid for normal A.
Matrix eval_matrix_spectral(const RationalFunction& f, const MatrixOperator& a);

struct SupNorm {
  double value = 0.0;
  double argmax_param = 0.0;  ///< boundary parameter of the maximiser
  bool at_infinity = false;
};

/// sup over the closed domain of |f|: boundary maximum or |f(∞)|.
SupNorm sup_norm_detail(const RationalFunction& f, const ConvexDomain& domain);
inline double sup_norm(const RationalFunction& f, const ConvexDomain& domain) {
  return sup_norm_detail(f, domain).value;
}

/// f_ε(z) = f(z) / (1 + εz); gains a simple pole at -1/ε and vanishes at ∞.
RationalFunction mobius_damp(const RationalFunction& f, double eps);

/// A_ε = A (I + εA)^{-1}.
MatrixOperator regularize_matrix(const MatrixOperator& a, double eps);

nlohmann::json to_json(const RationalFunction& f);
RationalFunction rational_from_json(const nlohmann::json& j);

}  // namespace spectral_lab
