#pragma once

// Deficiency spaces N+- = ker(T^* -+ i) of Laplace-type operators on the half
// line and on an interval, sampled on uniform grids, together with the von
// Neumann construction of extensions from a unitary K : N+ -> N-.

#include "saext/common.hpp"

namespace saext {

enum class DomainKind { HalfLine, Interval };

/// Sampled deficiency data. A function is a vector of length
/// components * grid.size(), component-major (component a occupies the block
/// [a*n, (a+1)*n)). Component a is acted on by -d^2/dx^2 + shifts[a]; the
/// one-body case has a single component with shift 0.
struct DeficiencyPair {
  int n_plus = 0;
  int n_minus = 0;
  std::vector<CVector> basis_plus;
  std::vector<CVector> basis_minus;
  RVector grid;
  DomainKind kind = DomainKind::HalfLine;
  int components = 1;
  std::vector<double> shifts{0.0};
};

/// Smallest decay e^{-Re(k) * extent} accepted for a half-line sample.
inline constexpr double kDecayFloor = 1e-8;

/// N+- of -d^2/dx^2 on [0, inf), sampled on [0, grid_extent] with grid_n
/// intervals. Basis vectors are L2-normalized and positive at x = 0:
/// N+ ~ exp(-(1-i)x/sqrt2), N- ~ exp(-(1+i)x/sqrt2).
/// Throws GridTooShort when the decay is not captured, InvalidArgument when
/// grid_n < 100.
DeficiencyPair half_line_laplacian_deficiency(double grid_extent, int grid_n);

/// N+- of -d^2/dx^2 on [0, length] with no boundary condition (two solutions each).
DeficiencyPair interval_laplacian_deficiency(double length, int grid_n);

/// Deficiency spaces of H_A (x) I + I (x) H_B with H_B = diag(lambdas), built
/// from solutions of H_A^* Phi = (+-i - lambda_k) Phi placed in the k-th slot.
/// lambdas must be finite and sorted descending.
DeficiencyPair bipartite_deficiency(const DeficiencyPair& def_a, const std::vector<double>& lambdas);

/// Discrete L2 inner product <u, v> (antilinear in u) with Simpson weights.
cplx inner_product(const DeficiencyPair& pair, const CVector& u, const CVector& v);
double l2_norm(const DeficiencyPair& pair, const CVector& u);

/// Applies -d^2/dx^2 + shift per component: 5-point stencil on nodes
/// 2..n-2, 3-point stencil on nodes 1 and n-1, zero at the endpoints.
CVector apply_operator(const DeficiencyPair& pair, const CVector& u);

/// ||(T^* - s i) xi|| / ||xi|| over nodes 2..n-2 with the 5-point stencil,
/// where s = +1 for N+ and -1 for N-.
double defining_residual(const DeficiencyPair& pair, const CVector& xi, int sign);

struct VonNeumannExtension {
  CMatrix k_matrix;  // n+ x n+, maps N+ coefficients to N- coefficients
  DeficiencyPair base;

  /// Throws DimensionMismatch if K is not n+ x n- square, NonUnitary otherwise.
  static VonNeumannExtension make(const DeficiencyPair& base, const CMatrix& k);
};

struct ExtensionAction {
  CVector domain_element;  // Phi0 + xi+ + K xi+
  CVector image;           // T Phi0 + i (xi+ - K xi+)
};

/// phi0 must vanish on the first and last two nodes of every component
/// (InvalidArgument otherwise).
ExtensionAction apply_von_neumann_extension(const VonNeumannExtension& ext, const CVector& phi0,
                                            const CVector& xi_plus);

}  // namespace saext
