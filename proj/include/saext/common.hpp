#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace saext {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorCode {
  NonUnitary,
  DimensionMismatch,
  GridTooShort,
  NoBoundState,
  AlphaSingular,
  NoGap,
  SolverFailure,
  BracketTooCoarse,
  NotAdditive,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every library failure is reported through this type; `code()` is stable and
/// machine-readable, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Ordered eigenpairs of a discretized operator.
struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending
  CMatrix eigenvectors;             // one column per eigenvalue
  std::vector<double> residuals;
  int mesh_n = 0;
};

}  // namespace saext
