#include "spectral_lab/rational_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/math/tools/minima.hpp>

namespace spectral_lab {

RationalFunction::RationalFunction(std::vector<PoleTerm> poles, Complex value_at_infinity)
    : poles_(std::move(poles)), inf_(value_at_infinity) {
  for (const PoleTerm& p : poles_) {
    if (p.coefficients.empty())
      throw Error(ErrorKind::InvalidArgument, "pole order must be >= 1");
    if (!std::isfinite(p.location.real()) || !std::isfinite(p.location.imag()))
      throw Error(ErrorKind::InvalidArgument, "pole location must be finite");
  }
}

RationalFunction RationalFunction::constant(Complex c) { return RationalFunction({}, c); }

RationalFunction RationalFunction::pole(Complex p, Complex c, int order) {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "pole order must be >= 1");
  std::vector<Complex> coeffs(order, 0.0);
  coeffs.back() = c;
  return RationalFunction({PoleTerm{p, coeffs}}, 0.0);
}

bool RationalFunction::is_zero() const {
  if (inf_ != Complex(0.0)) return false;
  for (const PoleTerm& p : poles_)
    for (const Complex& c : p.coefficients)
      if (c != Complex(0.0)) return false;
  return true;
}

RationalFunction RationalFunction::scaled(Complex s) const {
  RationalFunction out = *this;
  out.inf_ *= s;
  for (PoleTerm& p : out.poles_)
    for (Complex& c : p.coefficients) c *= s;
  return out;
}

Complex RationalFunction::eval(Complex z) const {
  Complex sum = inf_;
  for (const PoleTerm& p : poles_) {
    const Complex d = z - p.location;
    if (std::abs(d) <= 1e-14) throw Error(ErrorKind::Singularity, "evaluation within 1e-14 of a pole");
    const Complex inv = 1.0 / d;
    Complex pw = inv;
    for (const Complex& c : p.coefficients) {
      sum += c * pw;
      pw *= inv;
    }
  }
  return sum;
}

bool RationalFunction::valid_for(const ConvexDomain& domain, double min_distance) const {
  return std::all_of(poles_.begin(), poles_.end(), [&](const PoleTerm& p) {
    return domain.distance_to_closure(p.location) >= min_distance;
  });
}

void RationalFunction::require_valid_for(const ConvexDomain& domain) const {
  if (!valid_for(domain))
    throw Error(ErrorKind::Validity, "rational function has a pole in or near the closed domain");
}

Matrix eval_matrix_direct(const RationalFunction& f, const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix out = f.value_at_infinity() * id;
  for (const PoleTerm& p : f.poles()) {
    Eigen::PartialPivLU<Matrix> lu(a - p.location * id);
    if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::Numerical, "pole coincides with the spectrum");
    Matrix power = id;
    for (const Complex& c : p.coefficients) {
      power = lu.solve(power);
      out += c * power;
    }
  }
  return out;
}

Matrix eval_matrix_spectral(const RationalFunction& f, const MatrixOperator& a) {
  if (!a.is_normal(1e-10)) throw Error(ErrorKind::Precondition, "spectral path requires a normal matrix");
  Eigen::ComplexSchur<Matrix> schur(a.entries());
  if (schur.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "Schur decomposition failed");
  const Matrix& u = schur.matrixU();
  Vector d(a.n());
  for (Eigen::Index i = 0; i < a.n(); ++i) d(i) = f.eval(schur.matrixT()(i, i));
  return u * d.asDiagonal() * u.adjoint();
}

namespace {

constexpr int kGridSamples = 4096;
constexpr int kTailRun = 64;

double param_ceiling(const ConvexDomain& d) {
  // cosh overflows past ~710; keep a wide safety margin for the hyperbola.
  return d.kind() == DomainKind::Hyperbola ? 600.0 : 1e15;
}

// Deviation of |f| from |f(∞)| is small and non-increasing over the outermost
// kTailRun samples at one end of the grid.
bool tail_settled(const std::vector<double>& mags, double inf_mag, double scale, bool upper) {
  const int n = static_cast<int>(mags.size());
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kTailRun; ++k) {
    const int i = upper ? n - kTailRun + k : kTailRun - 1 - k;
    const double dev = std::abs(mags[i] - inf_mag);
    if (dev > 1e-9 * scale || dev > prev * (1 + 1e-12) + 1e-300) return false;
    prev = dev;
  }
  return true;
}

}  // namespace

SupNorm sup_norm_detail(const RationalFunction& f, const ConvexDomain& domain) {
  f.require_valid_for(domain);
  const double inf_mag = std::abs(f.value_at_infinity());
  SupNorm best{inf_mag, 0.0, true};
  if (f.poles().empty()) return best;

  auto mag = [&](double t) { return std::abs(f.eval(domain.boundary_point(t).sigma)); };

  // Local sampling around the boundary points nearest to each pole.
  std::vector<double> local;
  double reach = 1.0;
  for (const PoleTerm& p : f.poles()) {
    const auto near = domain.nearest(p.location);
    const double h = std::max(near.distance / domain.boundary_point(near.param).speed, 1e-12);
    for (int k = -32; k <= 32; ++k) local.push_back(near.param + h * k / 8.0);
    reach = std::max(reach, 4.0 * (std::abs(near.param) + 8 * h));
  }

  const double ceiling = param_ceiling(domain);
  constexpr double kScale = 1e-2;
  double window = std::min(reach, ceiling);
  std::vector<double> ts;
  std::vector<double> mags;
  for (;;) {
    const double umax = std::asinh(window / kScale);
    ts.clear();
    for (int i = 0; i <= kGridSamples; ++i)
      ts.push_back(kScale * std::sinh(-umax + 2 * umax * i / kGridSamples));
    mags.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) mags[i] = mag(ts[i]);
    const double scale = std::max({1.0, inf_mag, *std::max_element(mags.begin(), mags.end())});
    if ((tail_settled(mags, inf_mag, scale, true) && tail_settled(mags, inf_mag, scale, false)) ||
        window >= ceiling)
      break;
    window = std::min(window * 4, ceiling);
  }

  // Merge the dense grid with the pole-local samples (both inside the window).
  for (double t : local)
    if (std::abs(t) < window) ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  mags.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) mags[i] = mag(ts[i]);

  const int bits = std::numeric_limits<double>::digits / 2;
  auto neg = [&](double t) { return -mag(t); };
  const std::size_t n = ts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || mags[i] >= mags[i - 1];
    const bool right = i + 1 == n || mags[i] >= mags[i + 1];
    if (!left || !right) continue;
    double value = mags[i];
    double param = ts[i];
    if (i > 0 && i + 1 < n) {
      auto [t, v] = boost::math::tools::brent_find_minima(neg, ts[i - 1], ts[i + 1], bits);
      if (-v > value) {
        value = -v;
        param = t;
      }
    }
    if (value > best.value) best = {value, param, false};
  }
  return best;
}

RationalFunction mobius_damp(const RationalFunction& f, double eps) {
  if (!(eps > 0) || !std::isfinite(eps)) throw Error(ErrorKind::InvalidArgument, "damping requires eps > 0");
  const Complex q = -1.0 / eps;
  const double scale = 1.0 / eps;  // 1/(1+εz) = (1/ε) / (z - q)
  Complex q_coeff = scale * f.value_at_infinity();
  std::vector<PoleTerm> out;
  std::vector<Complex> q_higher;  // extra orders if q coincides with a pole of f

  for (const PoleTerm& p : f.poles()) {
    const Complex d = p.location - q;
    if (d == Complex(0.0)) {
      // c/(z-q)^j * 1/(z-q) = c/(z-q)^{j+1}
      if (q_higher.size() < p.coefficients.size() + 1) q_higher.resize(p.coefficients.size() + 1, 0.0);
      for (std::size_t j = 0; j < p.coefficients.size(); ++j) q_higher[j + 1] += scale * p.coefficients[j];
      continue;
    }
    // 1/((z-p)^j (z-q)) = (1/d) [ 1/(z-p)^j - 1/((z-p)^{j-1} (z-q)) ]
    PoleTerm np{p.location, std::vector<Complex>(p.coefficients.size(), 0.0)};
    for (std::size_t j = 1; j <= p.coefficients.size(); ++j) {
      const Complex c = scale * p.coefficients[j - 1];
      Complex factor = 1.0 / d;
      for (std::size_t i = j; i >= 1; --i) {
        np.coefficients[i - 1] += c * factor;
        factor *= -1.0 / d;
      }
      q_coeff += c * factor * d;
    }
    out.push_back(std::move(np));
  }
  if (q_higher.empty()) q_higher.resize(1, 0.0);
  q_higher[0] += q_coeff;
  out.push_back(PoleTerm{q, q_higher});
  return RationalFunction(std::move(out), 0.0);
}

MatrixOperator regularize_matrix(const MatrixOperator& a, double eps) {
  if (!(eps > 0) || !std::isfinite(eps)) throw Error(ErrorKind::InvalidArgument, "regularization requires eps > 0");
  const Eigen::Index n = a.n();
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) + eps * a.entries());
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::Numerical, "I + eps A is singular");
  return MatrixOperator(lu.solve(a.entries()));
}

nlohmann::json to_json(const RationalFunction& f) {
  nlohmann::json poles = nlohmann::json::array();
  nlohmann::json terms = nlohmann::json::array();
  for (const PoleTerm& p : f.poles()) {
    poles.push_back({{"re", p.location.real()}, {"im", p.location.imag()}, {"order", p.order()}});
    nlohmann::json row = nlohmann::json::array();
    for (const Complex& c : p.coefficients) row.push_back({{"re", c.real()}, {"im", c.imag()}});
    terms.push_back(std::move(row));
  }
  return {{"poles", poles},
          {"terms", terms},
          {"inf", {{"re", f.value_at_infinity().real()}, {"im", f.value_at_infinity().imag()}}}};
}

namespace {

Complex complex_from_json(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_object() || !j.contains("re"))
    throw Error(ErrorKind::Config, where + ": expected {re, im}");
  return {j.at("re").get<double>(), j.value("im", 0.0)};
}

}  // namespace

RationalFunction rational_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "rational function must be an object");
  const auto& poles = j.contains("poles") ? j.at("poles") : nlohmann::json::array();
  const auto& terms = j.contains("terms") ? j.at("terms") : nlohmann::json::array();
  if (!poles.is_array() || !terms.is_array() || poles.size() != terms.size())
    throw Error(ErrorKind::Config, "/terms must list one coefficient array per pole");
  std::vector<PoleTerm> out;
  for (std::size_t k = 0; k < poles.size(); ++k) {
    const std::string where = "/poles/" + std::to_string(k);
    PoleTerm p;
    p.location = complex_from_json(poles[k], where);
    const int order = poles[k].value("order", 1);
    if (order < 1) throw Error(ErrorKind::Config, where + "/order: must be >= 1");
    const auto& row = terms[k];
    if (!row.is_array() || static_cast<int>(row.size()) != order)
      throw Error(ErrorKind::Config, "/terms/" + std::to_string(k) + " must have `order` entries");
    for (std::size_t i = 0; i < row.size(); ++i)
      p.coefficients.push_back(complex_from_json(row[i], "/terms/" + std::to_string(k) + "/" + std::to_string(i)));
    out.push_back(std::move(p));
  }
  const Complex inf = j.contains("inf") ? complex_from_json(j.at("inf"), "/inf") : Complex(0.0);
  return RationalFunction(std::move(out), inf);
}

}  // namespace spectral_lab
