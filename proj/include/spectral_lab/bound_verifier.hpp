#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spectral_lab/boundary_transforms.hpp"
#include "spectral_lab/common.hpp"
#include "spectral_lab/convex_domain.hpp"
#include "spectral_lab/numerical_range.hpp"
#include "spectral_lab/rational_function.hpp"

namespace spectral_lab {

/// K(α) = 1 − α/π + √(2 − 4α/π + α²/π²) for α in [0, π/2] (rounding slack 1e-12).
double k_of_alpha(double alpha);

/// C⁴ − (2 − 2α/π)C³ − (1 − 2α/π)C²; vanishes at C = K(α).
double quartic_residual(double c, double alpha);

struct Lemma1Result {
  double margin = 0.0;  ///< 1 − 2α/π − max|g|
  double max_g = 0.0;
  double argmax_param = 0.0;
  double quad_error = 0.0;
};

/// Boundary parameters at which |g| is sampled: a sinh-spaced grid plus the
/// boundary points nearest to the poles of f.
std::vector<double> lemma1_sample_params(const RationalFunction& f, const ConvexDomain& domain,
                                         int n_samples);

/// Samples |g| on the boundary, each sample with its own quadrature built at
/// `target_tol`. f is divided by its sup norm first; it must vanish at ∞.
Lemma1Result verify_lemma1(const RationalFunction& f, const ConvexDomain& domain,
                           double target_tol, int n_samples = 32);

/// f(∞) = 0 and sup norm 1 on the domain: Möbius damping when f(∞) ≠ 0,
/// then division by the sup norm. Throws Precondition for f ≡ 0.
RationalFunction lemma_normalized(const RationalFunction& f, const ConvexDomain& domain,
                                  double damping_eps);

/// 2 − 2α/π − ‖S(f, A)‖ from precomputed transforms of a normalized f.
double lemma2_margin(const ConvexDomain& domain, const MatrixTransforms& t);
double verify_lemma2(const RationalFunction& f, const MatrixOperator& a,
                     const BoundaryQuadrature& quad);

/// ‖(F*F)² − F*F S* F + F*F G F‖ / max(1, ‖F‖⁴).
double schwenninger_residual(const Matrix& f_a, const Matrix& s, const Matrix& g);
double verify_schwenninger(const RationalFunction& f, const MatrixOperator& a,
                           const BoundaryQuadrature& quad);

/// ‖S* − F* − G‖.
double adjoint_residual(const Matrix& f_a, const Matrix& s, const Matrix& g);

struct MainBound {
  double sup_norm_f = 0.0;
  double norm_fa = 0.0;
  double ratio = 0.0;
};
/// ‖f(A)‖ / sup_Ω|f| with f(A) from the partial-fraction oracle. Throws
/// Precondition when f vanishes identically.
MainBound verify_main_bound(const RationalFunction& f, const MatrixOperator& a,
                            const ConvexDomain& domain);

struct RegularizationResult {
  std::vector<double> eps;
  std::vector<double> errors;        ///< ‖f(A_ε) − f(A)‖
  std::vector<double> apriori;       ///< ε (1 + |p|/d(p,Ω))² |c|
  std::vector<double> identity_residual;
  double slope = 0.0;                ///< least-squares slope of log e against log ε
  bool apriori_ok = true;
  bool monotone = true;
};

/// f must be c/(z − p) (plus a constant) with p outside the closed domain.
RegularizationResult verify_regularization(const RationalFunction& f, const MatrixOperator& a,
                                           const ConvexDomain& domain,
                                           std::span<const double> eps_list);

/// ε = 2^-1 … 2^-count.
std::vector<double> dyadic_eps(int count = 10);

/// diag(1, 10³, 10⁶).
MatrixOperator stiff_diagonal_matrix();
/// S (I + K) S with S = diag(√λ), λ log-spaced up to 10⁶, and K strictly upper
/// triangular with entries 1/2; its numerical range lies in Re z > 0.
MatrixOperator stiff_nonnormal_matrix(int n = 6);

struct TrialSpec {
  std::size_t domain_index = 0;
  int n = 0;
  EnsembleKind ensemble = EnsembleKind::Ginibre;
  double margin = 0.1;
  std::uint64_t seed = 0;
};

struct TrialRecord {
  std::size_t trial_id = 0;
  std::uint64_t seed = 0;
  std::size_t domain_index = 0;
  int n = 0;
  EnsembleKind ensemble = EnsembleKind::Ginibre;
  double ensemble_margin = 0.0;
  std::string function_id;
  double sup_norm_f = 0.0;
  double norm_fa = 0.0;
  double ratio = 0.0;
  double lemma1_margin = 0.0;
  double lemma2_margin = 0.0;
  double schwenninger_residual = 0.0;
  double adjoint_residual = 0.0;
  double quad_error = 0.0;
  bool failed = false;
  std::string error;
};

struct Aggregate {
  double max_ratio = 0.0;
  double max_ratio_over_k = 0.0;
  double min_margin_lemma1 = 0.0;
  double min_margin_lemma2 = 0.0;
  double max_schwenninger_residual = 0.0;
  double max_adjoint_residual = 0.0;
  double max_quad_error = 0.0;
  std::size_t violations = 0;
  std::size_t failures = 0;
  std::size_t trials = 0;
};

struct BoundReport {
  ConvexDomain domain = ConvexDomain::half_plane();
  double alpha = 0.0;
  double k_alpha = 0.0;
  std::vector<TrialRecord> trials;
  Aggregate aggregate;
};

struct NamedFunction {
  std::string id;
  RationalFunction f;
};

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Ginibre;
  int n = 8;
  int count = 1;
  double margin = 0.1;
};

struct CampaignDesign {
  std::vector<ConvexDomain> domains;
  std::vector<EnsembleSpec> ensembles;
  std::vector<NamedFunction> functions;
  double quad_tol = 1e-8;
  double slack_factor = 10.0;
  int n_angles = 256;
  int lemma1_samples = 32;
  double damping_eps = 0.1;
  std::uint64_t seed = 0;
  bool regularization = true;
};

struct RegularizationSummary {
  std::string matrix_id;
  double slope = 0.0;
  bool apriori_ok = true;
  double max_identity_residual = 0.0;
};

struct CampaignReport {
  std::vector<BoundReport> domains;
  std::vector<RegularizationSummary> regularization;
  Aggregate overall;
  double declared_tolerance = 0.0;
  std::size_t threads_used = 1;
};

/// Seed of the k-th matrix unit, derived from the master seed by splitmix64.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Enumerates (domain, ensemble, index) matrix units in report order.
std::vector<TrialSpec> plan_units(const CampaignDesign& design);

/// One matrix unit: the matrix is generated once and every function template
/// is checked against it. Never throws; failures are recorded per trial.
std::vector<TrialRecord> run_unit(const CampaignDesign& design, const TrialSpec& unit);

/// Worker count: `requested` (0 means hardware concurrency) capped by the
/// SPECTRAL_LAB_THREADS environment variable.
std::size_t resolve_threads(std::size_t requested);

/// Whether a completed trial breaks any bound by more than `tolerance`.
bool is_violation(const TrialRecord& r, double k_alpha, double tolerance);

/// Runs the design in parallel; the report is identical for every thread count.
CampaignReport run_campaign(const CampaignDesign& design, std::size_t threads = 0);

/// 0 when every margin is within slack, 1 on a violation, 2 on a hard failure.
int exit_code(const CampaignReport& report);

}  // namespace spectral_lab
