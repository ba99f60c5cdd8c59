#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace spectral_lab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

enum class ErrorKind {
  InvalidArgument,
  Domain,
  Singularity,
  Numerical,
  Validity,
  Precondition,
  Truncation,
  Generation,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the C layer can map
/// it onto a status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Spectral norm (largest singular value).
double norm2(const Matrix& m);

}  // namespace spectral_lab
