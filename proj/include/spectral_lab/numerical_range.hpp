#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "spectral_lab/common.hpp"
#include "spectral_lab/convex_domain.hpp"

namespace spectral_lab {

/// Dense complex square matrix with lazily computed spectral data. Copies
/// share the cache; the entries never change after construction.
class MatrixOperator {
 public:
  static constexpr Eigen::Index kMaxDimension = 512;

  explicit MatrixOperator(Matrix entries);

  const Matrix& entries() const { return entries_; }
  Eigen::Index n() const { return entries_.rows(); }

  /// Eigenvalues (cached, thread-safe).
  const std::vector<Complex>& eigenvalues() const;
  /// Eigenpairs as columns of `vectors`; computed on demand, not cached.
  std::pair<std::vector<Complex>, Matrix> eigenpairs() const;

  /// λ_max((e^{-iθ}A + e^{iθ}A*)/2), memoised per θ.
  double support(double theta) const;

  bool is_normal(double rel_tol = 1e-12) const;

 private:
  struct Cache {
    std::once_flag eig_once;
    std::vector<Complex> eigenvalues;
    std::mutex support_mutex;
    std::map<double, double> support;
  };

  Matrix entries_;
  std::shared_ptr<Cache> cache_;
};

/// Hermitian part of e^{-iθ}A.
Matrix rotated_hermitian_part(const Matrix& a, double theta);

double support_value(const MatrixOperator& a, double theta);

/// Rayleigh quotient of the top eigenvector of the rotated Hermitian part:
/// a point of W(A) on its supporting line in direction e^{iθ}.
Complex numrange_point(const MatrixOperator& a, double theta);

/// Boundary samples of W(A) on a uniform angle grid (n_angles >= 8).
std::vector<Complex> numrange_boundary(const MatrixOperator& a, int n_angles);

struct ContainmentCertificate {
  bool contained = false;
  /// Smallest clearance of a sampled W(A) boundary point from the domain
  /// boundary (negative when a sample is outside).
  double margin = 0.0;
  /// Same quantity evaluated at the vertices of the circumscribed polygon
  /// formed by the support lines; a lower bound for the exact clearance.
  double outer_margin = 0.0;
  /// λ_min of the Hermitian part: the exact half-plane test.
  double hermitian_min = 0.0;
  std::vector<std::pair<double, Complex>> probes;
};

ContainmentCertificate certify_containment(const MatrixOperator& a, const ConvexDomain& domain,
                                           int n_angles = 256);

enum class EnsembleKind { Ginibre, Jordan, Normal };

const char* to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& s);

/// Seeded A = B + sI where B is a scaled Ginibre matrix, a scaled nilpotent
/// Jordan block or a normal matrix with spectrum in the disc of radius 1/2,
/// and s > 0 is found by bisection so the certified clearance lies in
/// [margin, 2 margin].
MatrixOperator random_matrix_in_domain(const ConvexDomain& domain, int n, double margin,
                                       std::uint64_t seed,
                                       EnsembleKind kind = EnsembleKind::Ginibre,
                                       int n_angles = 256);

}  // namespace spectral_lab
