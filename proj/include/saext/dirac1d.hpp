#pragma once

// One-dimensional Dirac operators and sector-split quadratic forms.
//
// Interval model: D = i sigma1 d/dx on C^2 spinors over [0, L]. Boundary data
// is the 4-vector (xi(0), xi(L)). The Clifford action of the outward normal is
// J = diag(J0, JL) with J0 = -i sigma1 and JL = +i sigma1, and the boundary
// condition reads phi_- = U phi_+ in the bases of H+- = ker(J -+ i).

#include "saext/common.hpp"

#include <cstdint>
#include <utility>

namespace saext {

struct DiracBoundarySetup {
  CMatrix j_matrix;       // 4 x 4
  CMatrix h_plus_basis;   // 4 x 2: e_- at 0, e_+ at L
  CMatrix h_minus_basis;  // 4 x 2: e_+ at 0, e_- at L
  CMatrix u_map;          // 2 x 2 unitary H+ -> H-

  /// e_+- = (1, +-1)/sqrt2 are the sigma1 eigenvectors with positive first
  /// component. Throws DimensionMismatch (not 2 x 2) or NonUnitary.
  static DiracBoundarySetup interval(const CMatrix& u_map);
};

/// <J phi, psi> on boundary data (antilinear in the first slot).
cplx boundary_form(const DiracBoundarySetup& setup, const CVector& phi, const CVector& psi);

/// Boundary data with the same H+ component and H- component U phi_+.
CVector project_to_domain(const DiracBoundarySetup& setup, const CVector& phi);

/// ||phi_- - U phi_+||.
double boundary_condition_defect(const DiracBoundarySetup& setup, const CVector& phi);

/// det of the 2 x 2 boundary system at energy E:
/// e^{iEL} - (U01 + U10) - det(U) e^{-iEL}.
cplx secular_determinant(const DiracBoundarySetup& setup, double L, double E);

/// Real secular function sin(EL - theta/2) - Im(conj(s) U01) with
/// s = sqrt(det U) = e^{i theta/2}; it vanishes exactly where the determinant does.
double secular_function(const DiracBoundarySetup& setup, double L, double E);

/// Eigenvalues of D = i d/dtheta on the circle in the Fourier truncation
/// |n| <= n_modes: exactly -n_modes..n_modes, ascending. Eigenvectors are
/// grid samples at theta_j = 2 pi j / (2 n_modes + 1); residuals are
/// ||D v - E v|| with the grid matrix of D.
SpectralResult circle_dirac_spectrum(int n_modes);

/// Grid matrix of i d/dtheta on 2 n_modes + 1 equispaced points:
/// F diag(-n) F^H with the unitary DFT F.
CMatrix circle_dirac_matrix(int n_modes);

/// Roots of the secular function in [bracket.first, bracket.second], located by
/// sign changes on a scan with (bracket width)/1e4 cells and refined by
/// bisection to 1e-10. The scan is halved until two successive resolutions
/// agree on the root count (at most 6 times, else BracketTooCoarse).
/// n_eigs > 0 keeps the n_eigs roots of smallest |E|, n_eigs = 0 keeps all.
/// Eigenvectors hold the plane-wave coefficients (a0, b0) of
/// xi = a0 e^{-iEx} e_+ + b0 e^{iEx} e_-; residuals are |det| at each root.
SpectralResult interval_dirac_spectrum(double L, const DiracBoundarySetup& setup, int n_eigs,
                                       std::pair<double, double> bracket);

struct SectorSplit {
  CMatrix p_plus;
  CMatrix p_minus;
  CMatrix q_matrix;       // Q(u, v) = u^H q_matrix v
  RVector weights;        // diagonal Gram matrix of the discrete inner product
  CMatrix basis_plus;     // orthonormal (in the weighted product) basis of ran P+
  CMatrix basis_minus;
  CMatrix t_plus;         // representing blocks in those bases
  CMatrix t_minus;
  double lambda_min_plus = 0.0;   // lowest eigenvalue of t_plus (0 if empty)
  double lambda_max_minus = 0.0;  // highest eigenvalue of t_minus (0 if empty)
};

/// Position operator on a grid symmetric about 0: Q = diag(x w), P+ = [x > 0].
/// Empty weights mean unit weights.
SectorSplit sector_split_position(const std::vector<double>& grid, const std::vector<double>& weights = {});

/// Momentum i d/dtheta on n_fourier (odd) periodic samples: Q = F diag(-n) F^H,
/// P+ = modes with -n > 0, the zero mode in P-.
SectorSplit sector_split_momentum(int n_fourier);

/// Validates Q Hermitian and P+ an orthogonal projector, then decomposes.
/// Throws NotAdditive if ||P+ Q P-|| > 1e-10, DimensionMismatch, InvalidArgument.
SectorSplit sector_split_custom(const CMatrix& q_matrix, const CMatrix& p_plus);

inline constexpr double kAdditivityTol = 1e-10;

/// Q(u, v) = u^H q_matrix v.
cplx form_value(const SectorSplit& split, const CVector& u, const CVector& v);

struct ReconstructedOperator {
  CMatrix t;                      // T+ P+ + T- P-
  double hermiticity_defect;      // ||T - T^H||
  double representation_defect;   // max |Q(u,v) - <u, T v>| / (||u|| ||v|| max(1, ||Q||))
  bool verified;                  // both defects <= 1e-10
};

ReconstructedOperator reconstruct_operator(const SectorSplit& split, int n_pairs = 50, std::uint64_t seed = 0);

/// (1+a)||P+ phi||^2 + Q(P+ phi) + (1+b)||P- phi||^2 - Q(P- phi) with
/// a = max(0, -lambda_min_plus), b = max(0, lambda_max_minus).
double graph_norm_sq(const SectorSplit& split, const CVector& phi);

}  // namespace saext
