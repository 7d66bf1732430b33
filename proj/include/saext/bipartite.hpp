#pragma once

// Half line x C^2 system H = -d^2/dx^2 (x) I + I (x) diag(lambda1, lambda2).
//
// Boundary angles alpha1, alpha2 use the angle form of the compatibility
// curve: a bound-state component e^{-kappa x} with
// kappa = tan(alpha/2) > 0, alpha in (0, pi). The matching boundary unitary in
// the library convention is diag(e^{-i alpha1}, e^{-i alpha2}) (Cayley
// transform diag(kappa1, kappa2)).

#include "saext/boundary_param.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace saext {

struct BipartiteSystem {
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  /// Throws InvalidArgument unless both are finite and lambda1 >= lambda2.
  /// lambda1 = lambda2 (sigma = 0) is accepted as the degenerate limit.
  static BipartiteSystem make(double lambda1, double lambda2);
  double sigma() const { return lambda1 - lambda2; }
};

struct BipartiteBoundState {
  double energy = 0.0;              // lambda1 - tan^2(alpha1/2)
  double energy_from_alpha2 = 0.0;  // lambda2 - tan^2(alpha2/2)
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  std::array<double, 2> amplitudes{};  // normalized C1, C2 (unit L2 norm of the state)
  std::array<double, 2> schmidt{};     // squared Schmidt coefficients, descending
  double entropy = 0.0;                // nats
};

/// Relative margin below which tan^2(alpha1/2) - sigma counts as zero
/// (a decay rate kappa2 = 0, not square integrable).
inline constexpr double kNormalizabilityTol = 1e-12;
inline constexpr double kAlphaSingularTol = 1e-12;

/// Bound state for boundary angle alpha1. c1, c2 are the pre-normalization
/// amplitudes of the two spin components (both 1 by default).
/// Throws AlphaSingular (alpha1 = pi mod 2 pi), NoBoundState (tan(alpha1/2) <= 0
/// or tan^2(alpha1/2) <= sigma), InvalidArgument (amplitudes not positive finite).
BipartiteBoundState bound_state(const BipartiteSystem& sys, double alpha1, double c1 = 1.0, double c2 = 1.0);

/// Schmidt data of c1 e^{-k1 x} (x) e1 + c2 e^{-k2 x} (x) e2 from the closed
/// form Gram matrix <e^{-a x}, e^{-b x}> = 1/(a + b).
void schmidt_from_gram(double kappa1, double kappa2, double c1, double c2, BipartiteBoundState& out);

/// diag(e^{-i alpha1}, e^{-i alpha2}), the library-convention unitary of a bound state.
BoundaryUnitary bound_state_unitary(const BipartiteBoundState& st);

struct CurvePoint {
  double alpha1;
  double alpha2;
};

struct CurveOmission {
  double alpha1;
  std::string reason;
};

struct CompatibilityCurve {
  std::vector<CurvePoint> points;
  std::vector<CurveOmission> omitted;
};

/// alpha2 = 2 atan(sqrt(tan^2(alpha1/2) - sigma)) for every admissible sample.
/// Throws InvalidArgument if sigma < 0 or not finite.
CompatibilityCurve compatibility_curve(double sigma, const std::vector<double>& alpha1_samples);

enum class PathFlag { Ok, NoBoundState, NonNormalizable, AlphaSingular };
std::string_view to_string(PathFlag flag);

struct PathSample {
  double s = 0.0;
  PathFlag flag = PathFlag::Ok;
  std::optional<BipartiteBoundState> state;
};

/// Instantaneous bound states along U(s) with alpha1 = 2s.
std::vector<PathSample> adiabatic_path(const BipartiteSystem& sys, const std::vector<double>& s_samples,
                                       double c1 = 1.0, double c2 = 1.0);

struct SeparabilityOptions {
  double length = 12.0;  // truncation radius R, Dirichlet at R
  int n_elements = 400;
  int n_times = 20;
  double threshold = 1e-8;
};

struct SeparabilityResult {
  bool separable = true;
  double max_entropy = 0.0;
  std::vector<double> times;
  std::vector<double> entropies;
};

/// Evolves sin(pi x / R) (x) (1, 1)/sqrt2 under the discretized e^{-itH_U} on
/// [0, R] and records the spin entanglement entropy at n_times uniform times
/// in [0, evolve_time]. `boundary` is either the 2 x 2 spin unitary at x = 0
/// (Dirichlet is added at R) or a full 4 x 4 unitary on (point, spin).
/// Throws NoGap, DimensionMismatch, InvalidArgument.
SeparabilityResult separability_test(const BipartiteSystem& sys, const BoundaryUnitary& boundary, double evolve_time,
                                     const SeparabilityOptions& opts = {});

}  // namespace saext
