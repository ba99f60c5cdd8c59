#include "spectral_lab/common.hpp"

#include <Eigen/SVD>

namespace spectral_lab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Validity: return "validity error";
    case ErrorKind::Precondition: return "precondition violated";
    case ErrorKind::Truncation: return "truncation failure";
    case ErrorKind::Generation: return "generation error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace spectral_lab
