#pragma once

// Unitary parametrization of self-adjoint boundary conditions.
//
// Convention used throughout the library: a boundary unitary U selects the
// boundary data (phi, phidot) with
//
//     phi - i*phidot = U (phi + i*phidot)
//
// where phidot is the outward normal derivative. Splitting the boundary space
// as W (+) W-perp, with W the -1 eigenspace of U, the condition becomes
// P_W phi = 0 together with phidot = A_U phi on W-perp, A_U = i(U-I)(U+I)^-1.
// Formulas written in the opposite convention (phi + i*phidot on the left)
// are recovered with U -> conj(U), i.e. alpha -> -alpha for U = e^{i alpha}.

#include "saext/common.hpp"

#include <variant>

namespace saext {

/// Angular distance from pi below which an eigenvalue is assigned to W.
inline constexpr double kMinusOneClusterTol = 1e-9;
/// Tolerance accepted by from_matrix for U^H U = I (Frobenius norm).
inline constexpr double kUnitaryTol = 1e-10;
/// A spectrum outside W that comes closer than this to -1 is flagged NoGap.
inline constexpr double kNoGapThreshold = 1e-6;

class BoundaryUnitary {
 public:
  /// The 0 x 0 unitary; use from_matrix for anything else.
  BoundaryUnitary() = default;

  /// Validates unitarity and computes the spectral metadata.
  /// Throws Error{NonUnitary} if ||U^H U - I||_F > kUnitaryTol.
  static BoundaryUnitary from_matrix(const CMatrix& matrix);

  const CMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  /// pi minus the largest |theta| over eigenvalues e^{i theta} outside W
  /// (pi when that set is empty).
  double gap_delta() const { return gap_delta_; }
  /// True when the non-W spectrum is numerically touching -1.
  bool no_gap() const { return no_gap_; }

  /// Orthonormal basis of W (n x k, possibly k = 0).
  const CMatrix& w_basis() const { return w_basis_; }
  /// Orthonormal basis of W-perp (n x (n-k)); the identity when W is empty.
  const CMatrix& complement_basis() const { return complement_basis_; }
  /// Partial Cayley transform on W-perp, in complement_basis() coordinates.
  const CMatrix& cayley() const { return cayley_; }
  /// The same transform embedded in the full space (zero on W).
  CMatrix cayley_full() const;
  CMatrix w_projector() const;
  /// Eigenvalue angles in (-pi, pi], ascending.
  const std::vector<double>& eigen_angles() const { return angles_; }

 private:
  CMatrix matrix_;
  double gap_delta_ = kPi;
  bool no_gap_ = false;
  CMatrix w_basis_;
  CMatrix complement_basis_;
  CMatrix cayley_;
  std::vector<double> angles_;
};

/// Inverse Cayley map: (I - iA)(I + iA)^-1 for a Hermitian A.
CMatrix inverse_cayley(const CMatrix& a);

struct Dirichlet {};
struct Neumann {};
struct Robin {
  double c;  // phidot = c * phi
};
struct QuasiPeriodic {
  double tau;  // phi(L) = e^{i tau} phi(0), Phi'(L) = e^{i tau} Phi'(0)
};
using NamedCondition = std::variant<Dirichlet, Neumann, Robin, QuasiPeriodic>;

/// Dirichlet -> -I, Neumann -> I, Robin(c) -> e^{i alpha} I with
/// alpha = -2 atan(c), QuasiPeriodic(tau) -> [[0, e^{-i tau}], [e^{i tau}, 0]]
/// (only for n = 2).
BoundaryUnitary named_condition(const NamedCondition& kind, int n);

struct BoundaryData {
  CVector trace;         // phi
  CVector normal_trace;  // phidot, outward normal derivative
};

struct ConditionCheck {
  bool satisfied;
  double residual;  // max(||P_W phi||, ||phidot_perp - A_U phi_perp||)
};

ConditionCheck check_boundary_condition(const BoundaryUnitary& bu, const BoundaryData& bd, double tol);

}  // namespace saext
