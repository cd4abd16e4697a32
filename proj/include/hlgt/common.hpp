#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hlgt {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// invalid group spec, bad cutoff, malformed input
struct ConfigError : Error {
  using Error::Error;
};
// argument outside the mathematical domain (beta <= 0, ...)
struct DomainError : Error {
  using Error::Error;
};
// caller broke a precondition (dimension mismatch, non-adapted input)
struct ContractError : Error {
  using Error::Error;
};
// dense realization would exceed the guardrail
struct ResourceError : Error {
  using Error::Error;
};
struct UnsupportedError : Error {
  using Error::Error;
};
// truncation did not converge at the requested cutoff
struct CutoffError : Error {
  using Error::Error;
};

// Largest dense operator dimension squared we materialize (|G|^{2E}).
inline constexpr long kDenseGuardrail = 4096;

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace hlgt
