#include "spectral_lab/numerical_range.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <boost/math/tools/minima.hpp>

namespace spectral_lab {

MatrixOperator::MatrixOperator(Matrix entries)
    : entries_(std::move(entries)), cache_(std::make_shared<Cache>()) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
    throw Error(ErrorKind::InvalidArgument, "matrix must be square with n >= 1");
  if (entries_.rows() > kMaxDimension)
    throw Error(ErrorKind::InvalidArgument, "matrix dimension exceeds 512");
  if (!entries_.allFinite()) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
}

const std::vector<Complex>& MatrixOperator::eigenvalues() const {
  std::call_once(cache_->eig_once, [&] {
    Eigen::ComplexEigenSolver<Matrix> es(entries_, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "eigenvalue solver failed");
    const auto& ev = es.eigenvalues();
    cache_->eigenvalues.assign(ev.data(), ev.data() + ev.size());
  });
  return cache_->eigenvalues;
}

std::pair<std::vector<Complex>, Matrix> MatrixOperator::eigenpairs() const {
  Eigen::ComplexEigenSolver<Matrix> es(entries_, true);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "eigenvalue solver failed");
  const auto& ev = es.eigenvalues();
  return {std::vector<Complex>(ev.data(), ev.data() + ev.size()), es.eigenvectors()};
}

Matrix rotated_hermitian_part(const Matrix& a, double theta) {
  const Complex rot = std::polar(1.0, -theta);
  const Matrix r = rot * a;
  return (r + r.adjoint()) * 0.5;
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> hermitian_eigs(const Matrix& h, bool vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, vectors ? Eigen::ComputeEigenvectors
                                                      : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "Hermitian eigensolver failed");
  return es;
}

}  // namespace

double MatrixOperator::support(double theta) const {
  {
    std::lock_guard lock(cache_->support_mutex);
    auto it = cache_->support.find(theta);
    if (it != cache_->support.end()) return it->second;
  }
  const auto es = hermitian_eigs(rotated_hermitian_part(entries_, theta), false);
  const double h = es.eigenvalues()(es.eigenvalues().size() - 1);
  std::lock_guard lock(cache_->support_mutex);
  cache_->support.emplace(theta, h);
  return h;
}

bool MatrixOperator::is_normal(double rel_tol) const {
  const Matrix c = entries_ * entries_.adjoint() - entries_.adjoint() * entries_;
  const double scale = std::max(1.0, entries_.squaredNorm());
  return c.norm() <= rel_tol * scale;
}

double support_value(const MatrixOperator& a, double theta) { return a.support(theta); }

Complex numrange_point(const MatrixOperator& a, double theta) {
  const auto es = hermitian_eigs(rotated_hermitian_part(a.entries(), theta), true);
  const Vector v = es.eigenvectors().col(es.eigenvectors().cols() - 1);
  return v.dot(a.entries() * v);  // dot() conjugates the first argument
}

std::vector<Complex> numrange_boundary(const MatrixOperator& a, int n_angles) {
  if (n_angles < 8) throw Error(ErrorKind::InvalidArgument, "numrange_boundary needs n_angles >= 8");
  std::vector<Complex> pts;
  pts.reserve(n_angles);
  for (int k = 0; k < n_angles; ++k) pts.push_back(numrange_point(a, 2 * kPi * k / n_angles));
  return pts;
}

ContainmentCertificate certify_containment(const MatrixOperator& a, const ConvexDomain& domain,
                                           int n_angles) {
  if (n_angles < 16) throw Error(ErrorKind::InvalidArgument, "certify_containment needs n_angles >= 16");
  ContainmentCertificate cert;

  const auto herm = hermitian_eigs(rotated_hermitian_part(a.entries(), 0.0), false);
  cert.hermitian_min = herm.eigenvalues()(0);

  std::vector<double> support(n_angles);
  cert.probes.reserve(n_angles);
  for (int k = 0; k < n_angles; ++k) {
    const double theta = 2 * kPi * k / n_angles;
    const auto es = hermitian_eigs(rotated_hermitian_part(a.entries(), theta), true);
    const Eigen::Index top = es.eigenvalues().size() - 1;
    support[k] = es.eigenvalues()(top);
    const Vector v = es.eigenvectors().col(top);
    const Complex z = v.dot(a.entries() * v);
    // The Rayleigh point must sit on its support line.
    const double gap = std::abs(std::real(std::polar(1.0, -theta) * z) - support[k]);
    if (gap > 1e-9 * (1.0 + std::abs(support[k]) + a.entries().norm()))
      throw Error(ErrorKind::Numerical, "support-line cross-check failed");
    cert.probes.emplace_back(theta, z);
  }

  if (domain.kind() == DomainKind::HalfPlane) {
    cert.margin = cert.hermitian_min;
    cert.outer_margin = cert.hermitian_min;
    cert.contained = cert.margin > 0;
    return cert;
  }

  auto clearance = [&](Complex z) { return domain.signed_distance(z); };
  int worst = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_angles; ++k) {
    const double c = clearance(cert.probes[k].second);
    if (c < margin) {
      margin = c;
      worst = k;
    }
  }
  // Local refinement of the worst probe over the angle.
  const double step = 2 * kPi / n_angles;
  const double th0 = cert.probes[worst].first;
  auto along = [&](double th) { return clearance(numrange_point(a, th)); };
  auto [th_best, c_best] = boost::math::tools::brent_find_minima(
      along, th0 - step, th0 + step, std::numeric_limits<double>::digits / 2);
  if (c_best < margin) {
    margin = c_best;
    cert.probes.emplace_back(th_best, numrange_point(a, th_best));
  }
  cert.margin = margin;

  // Circumscribed polygon: intersect consecutive support lines.
  double outer = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_angles; ++k) {
    const int j = (k + 1) % n_angles;
    const double t1 = 2 * kPi * k / n_angles;
    const double t2 = 2 * kPi * j / n_angles;
    const double det = std::sin(t2 - t1);
    const double x = (support[k] * std::sin(t2) - support[j] * std::sin(t1)) / det;
    const double y = (support[j] * std::cos(t1) - support[k] * std::cos(t2)) / det;
    outer = std::min(outer, clearance(Complex(x, y)));
  }
  cert.outer_margin = outer;
  cert.contained = cert.margin > 0 && cert.hermitian_min > 0;
  return cert;
}

const char* to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::Ginibre: return "ginibre";
    case EnsembleKind::Jordan: return "jordan";
    case EnsembleKind::Normal: return "normal";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from_string(const std::string& s) {
  if (s == "ginibre") return EnsembleKind::Ginibre;
  if (s == "jordan") return EnsembleKind::Jordan;
  if (s == "normal") return EnsembleKind::Normal;
  throw Error(ErrorKind::InvalidArgument, "unknown ensemble kind '" + s + "'");
}

namespace {

Matrix ginibre(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  Matrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

Matrix base_matrix(EnsembleKind kind, int n, std::mt19937_64& rng) {
  constexpr double kRadius = 0.5;
  switch (kind) {
    case EnsembleKind::Ginibre: {
      const Matrix g = ginibre(n, rng);
      return g * (kRadius / norm2(g));
    }
    case EnsembleKind::Jordan: {
      Matrix j = Matrix::Zero(n, n);
      for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = kRadius;
      return j;
    }
    case EnsembleKind::Normal: {
      const Matrix g = ginibre(n, rng);
      Eigen::HouseholderQR<Matrix> qr(g);
      Matrix q = qr.householderQ();
      const Matrix r = qr.matrixQR();
      for (int i = 0; i < n; ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0) q.col(i) *= r(i, i) / mag;
      }
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Vector eig(n);
      for (int i = 0; i < n; ++i) {
        const double rad = kRadius * std::sqrt(unit(rng));
        eig(i) = std::polar(rad, 2 * kPi * unit(rng));
      }
      return q * eig.asDiagonal() * q.adjoint();
    }
  }
  return Matrix::Zero(n, n);
}

}  // namespace

MatrixOperator random_matrix_in_domain(const ConvexDomain& domain, int n, double margin,
                                       std::uint64_t seed, EnsembleKind kind, int n_angles) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "ensemble dimension must be >= 1");
  if (!(margin > 0)) throw Error(ErrorKind::InvalidArgument, "ensemble margin must be > 0");
  std::mt19937_64 rng(seed);
  const Matrix base = base_matrix(kind, n, rng);
  const MatrixOperator base_op(base);

  // W(B + sI) = W(B) + s, and clearance grows monotonically with s because
  // every domain is closed under positive real shifts.
  const std::vector<Complex> probes = numrange_boundary(base_op, 64);
  auto clearance = [&](double s) {
    double c = std::numeric_limits<double>::infinity();
    for (const Complex& z : probes) c = std::min(c, domain.signed_distance(z + s));
    return c;
  };

  const double target = 1.5 * margin;
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (clearance(lo) >= target) {
    lo -= 1.0;
    if (++guard > 200) throw Error(ErrorKind::Generation, "could not bracket the shift from below");
  }
  while (clearance(hi) <= target) {
    hi *= 2.0;
    if (++guard > 200) throw Error(ErrorKind::Generation, "could not bracket the shift from above");
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double c = clearance(mid);
    if (std::abs(c - target) <= 0.05 * margin) {
      MatrixOperator a(base + mid * Matrix::Identity(n, n));
      const auto cert = certify_containment(a, domain, n_angles);
      if (!cert.contained || cert.margin < margin || cert.margin > 2 * margin)
        throw Error(ErrorKind::Generation, "certified clearance outside [margin, 2 margin]");
      return a;
    }
    (c < target ? lo : hi) = mid;
  }
  throw Error(ErrorKind::Generation, "shift bisection did not converge in 200 iterations");
}

}  // namespace spectral_lab
