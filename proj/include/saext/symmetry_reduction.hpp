#pragma once

// U(1)-invariance in a truncated Fourier model of a rotationally symmetric
// boundary. The boundary space is C^{(2N+1) m}, mode-major: index
// (n + N) * m + j for Fourier mode n in [-N, N] and radial index j < m.

#include "saext/boundary_param.hpp"

#include <cstdint>

namespace saext {

inline constexpr int kDefaultFourierModes = 16;
inline constexpr double kCommutantTol = 1e-10;
inline constexpr double kFormInvarianceTol = 1e-10;

struct GroupRep {
  int n_modes = 0;     // N
  int radial_dim = 1;  // m
  std::vector<double> sample_elements;
  std::vector<CMatrix> matrices;

  /// V(alpha) = diag(e^{i n alpha}) (x) I_m for each sampled alpha.
  static GroupRep u1(int n_modes, int radial_dim, const std::vector<double>& samples);
  CMatrix at(double alpha) const;
  Eigen::Index dim() const { return static_cast<Eigen::Index>(2 * n_modes + 1) * radial_dim; }
};

struct AdmissibleUnitary {
  CMatrix radial_factor;      // u, m x m
  std::vector<double> phases; // beta_n, n = -N..N
  CMatrix assembled;          // blockdiag(e^{i beta_n} u)
  double gap_delta = kPi;
  bool has_gap = true;
  std::vector<int> gapless_modes;  // modes n whose block has no gap
};

/// Throws InvalidArgument (even phase count), NonUnitary (u).
AdmissibleUnitary build_admissible(const CMatrix& radial_factor, const std::vector<double>& phases);

struct CommutantResult {
  double max_norm;  // max_g ||U V(g) - V(g) U||_2
  bool pass;
};

/// Throws DimensionMismatch.
CommutantResult commutant_check(const CMatrix& u_matrix, const GroupRep& rep);

/// Cyclic shift n -> n + 1 of the Fourier modes (identity on the radial factor).
CMatrix mode_shift(int n_modes, int radial_dim);

struct FormInvarianceReport {
  double max_defect = 0.0;   // max |Q(Vphi, Vpsi) - Q(phi, psi)| / (||phi|| ||psi||) and domain leakage
  bool pass = true;
  double negative_control_defect = 0.0;  // same measure for mode_shift-perturbed unitary
};

/// Q(phi, psi) = -<phi, A_U psi> on the form domain P_W phi = 0, sampled with
/// n_random random pairs and every g of rep. The negative control uses
/// mode_shift * U.
FormInvarianceReport invariance_of_form_check(const CMatrix& u_matrix, const GroupRep& rep, int n_random,
                                              std::uint64_t seed = 0);
FormInvarianceReport invariance_of_form_check(const AdmissibleUnitary& admissible, const GroupRep& rep, int n_random,
                                              std::uint64_t seed = 0);

/// Radial form int_0^1 (|f'|^2 + m^2 |f|^2 / r^2) r dr - c |f(1)|^2 with weight-r
/// P1 elements; f(0) = 0 for m != 0; robin_c = -infinity means Dirichlet at r = 1.
/// Throws InvalidArgument (|m| > n_modes, n_elements < 8, n_eigs out of range,
/// robin_c NaN or +infinity).
SpectralResult disk_mode_spectrum(int m, double robin_c, int n_elements, int n_eigs,
                                  int n_modes = kDefaultFourierModes);

enum class H2Class { Finite, Divergent };

struct CornerReport {
  double theta_opening = 0.0;
  double exponent = 0.0;            // pi / Theta
  double harmonic_residual = 0.0;   // max |Laplacian| / (sum of term magnitudes)
  double edge_trace_max = 0.0;      // max |Phi| on theta = 0 and theta = Theta
  std::vector<double> epsilons;     // 1e-2, 1e-3, 1e-4 scaled by epsilon / 1e-2
  std::vector<double> integrals;    // H2 seminorm squared over r in (eps, 1)
  double slope = 0.0;               // d log(integral) / d log(eps)
  H2Class h2_class = H2Class::Finite;
  double h2_value = 0.0;            // extrapolated seminorm squared when finite
  double divergence_rate = 0.0;     // -slope when divergent
};

/// Singular function Phi = r^a sin(a theta), a = pi / Theta, on the sector of
/// opening Theta. `epsilon` is the largest cut-off radius; the integrals use
/// epsilon, epsilon/10, epsilon/100. n_quad is the number of Gauss nodes per
/// direction. Throws InvalidArgument outside Theta in (0, 2 pi),
/// epsilon in (0, 0.1), n_quad >= 1000.
CornerReport corner_singularity(double theta_opening, double epsilon, int n_quad);

}  // namespace saext
