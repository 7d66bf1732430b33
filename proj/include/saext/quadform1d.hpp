#pragma once

// P1 finite elements for the form
//
//     Q_U(Phi, Psi) = <Phi', Psi'> - <phi, A_U psi> + <Phi, V Psi>
//
// on [0, L] with values in C^channels, constrained to P_W phi = 0.
// Degrees of freedom are node-major: dof = node * channels + channel. The
// boundary trace is ordered (point, channel) with point 0 = x = 0 and
// point 1 = x = L, so the boundary unitary is (2 * channels) x (2 * channels).

#include "saext/boundary_param.hpp"

#include <cstdint>

namespace saext {

struct FEMAssembly {
  RVector nodes;
  int channels = 1;
  RMatrix stiffness;           // int phi_i' phi_j'
  RMatrix mass;                // int phi_i phi_j
  RMatrix potential;           // lumped potential plus consistent-mass channel shifts
  CMatrix boundary_correction; // -E^H A_U E on boundary dofs
  CMatrix constrained_basis;   // Z: orthonormal columns spanning {v : P_W (E v) = 0}
  CMatrix constraint;          // Z Z^H
  BoundaryUnitary boundary;
  double potential_floor = 0.0;  // a constant c with <v, potential v> >= c <v, mass v>

  Eigen::Index dofs() const { return stiffness.rows(); }
  /// Full form matrix K' = stiffness + potential + boundary_correction.
  CMatrix form_matrix() const;
  /// Z^H K' Z and Z^H M Z.
  CMatrix reduced_form() const;
  CMatrix reduced_mass() const;
};

/// Single-channel assembly. `potential` is empty or sampled at the n+1 nodes.
/// Throws InvalidArgument (n_elements < 4, L <= 0, bad potential) or
/// DimensionMismatch (bu not 2 x 2).
FEMAssembly assemble(double L, int n_elements, const BoundaryUnitary& bu,
                     const std::vector<double>& potential = {});

/// Multi-channel assembly; channel c carries the constant potential
/// channel_shifts[c] (applied with the consistent mass matrix).
FEMAssembly assemble_multichannel(double L, int n_elements, const BoundaryUnitary& bu,
                                  const std::vector<double>& channel_shifts,
                                  const std::vector<double>& potential = {});

/// Lowest n_eigs eigenpairs of K' v = E M v on the constrained subspace.
/// Eigenvectors are returned in full dof coordinates, M-normalized, with the
/// largest-magnitude entry real and positive.
SpectralResult solve(const FEMAssembly& asm_, int n_eigs);

/// All eigenpairs of the constrained problem (used for time evolution).
SpectralResult solve_all(const FEMAssembly& asm_);

struct SemiboundEstimate {
  double lower_bound_estimate;  // min Rayleigh quotient over random and smooth trials and the ground state
  double certified_bound;       // lowest K-Robin eigenvalue plus potential floor
  double robin_constant;        // K = ||A_U||
  bool holds;                   // lower_bound_estimate >= certified_bound - 1e-9
};

/// Lowest eigenvalue of -u'' on [0, L] with u' = K u at both ends (outward
/// derivative): -kappa^2 with kappa tanh(kappa L / 2) = K, or 0 when K = 0.
double robin_ground_energy(double L, double K);

/// Throws NoGap when the boundary unitary has no gap.
SemiboundEstimate semibound_estimate(const FEMAssembly& asm_, int n_samples, std::uint64_t seed = 0);

struct RepresentationViolation {
  int eigen_index;
  int test_index;
  double relative_defect;
};

struct RepresentationReport {
  bool passed = true;
  double max_relative_defect = 0.0;
  std::vector<RepresentationViolation> violations;
  /// Discrete outward normal traces per eigenvector, ordered like the boundary
  /// trace: (-(v_1 - v_0)/h, (v_n - v_{n-1})/h) per channel.
  std::vector<CVector> normal_traces;
};

/// Checks Q(u, v) = E <u, v> for n_tests random u in the form domain and
/// every pair (E, v) in `result`, relative tolerance `tol`.
RepresentationReport representing_operator_check(const FEMAssembly& asm_, const SpectralResult& result,
                                                 int n_tests = 20, std::uint64_t seed = 0, double tol = 1e-8);

}  // namespace saext
