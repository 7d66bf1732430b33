#include "saext/bipartite.hpp"

#include "saext/numeric.hpp"
#include "saext/quadform1d.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace saext {

namespace {

bool near_pi(double alpha) { return std::abs(std::abs(numeric::wrap_angle(alpha)) - kPi) <= kAlphaSingularTol; }

// Classifies alpha1 without throwing; Ok means a bound state exists.
PathFlag classify(const BipartiteSystem& sys, double alpha1) {
  if (near_pi(alpha1)) return PathFlag::AlphaSingular;
  const double t = std::tan(0.5 * alpha1);
  if (!(t > 0)) return PathFlag::NoBoundState;
  const double margin = t * t - sys.sigma();
  if (margin < -kNormalizabilityTol * std::max(1.0, sys.sigma())) return PathFlag::NoBoundState;
  if (margin <= kNormalizabilityTol * std::max(1.0, sys.sigma())) return PathFlag::NonNormalizable;
  return PathFlag::Ok;
}

void check_amplitude(double c) {
  if (!(std::isfinite(c) && c > 0)) throw Error(ErrorCode::InvalidArgument, "amplitudes must be positive and finite");
}

}  // namespace

BipartiteSystem BipartiteSystem::make(double lambda1, double lambda2) {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2))
    throw Error(ErrorCode::InvalidArgument, "bulk eigenvalues must be finite");
  if (lambda1 < lambda2) throw Error(ErrorCode::InvalidArgument, "lambda1 must be >= lambda2");
  return {lambda1, lambda2};
}

void schmidt_from_gram(double kappa1, double kappa2, double c1, double c2, BipartiteBoundState& out) {
  Eigen::Matrix2d rho;
  rho(0, 0) = c1 * c1 / (2.0 * kappa1);
  rho(1, 1) = c2 * c2 / (2.0 * kappa2);
  rho(0, 1) = rho(1, 0) = c1 * c2 / (kappa1 + kappa2);
  const double norm2 = rho.trace();
  rho /= norm2;
  const double scale = 1.0 / std::sqrt(norm2);
  out.amplitudes = {c1 * scale, c2 * scale};

  // Closed-form eigenvalues of a real symmetric 2x2 with unit trace.
  const double det = rho.determinant();
  const double disc = std::sqrt(std::max(0.0, 0.25 - det));
  double p1 = 0.5 + disc;
  double p2 = std::max(0.0, det / p1);  // small eigenvalue without cancellation
  p1 = 1.0 - p2;
  out.schmidt = {p1, p2};
  out.entropy = numeric::entropy({p1, p2});
}

BipartiteBoundState bound_state(const BipartiteSystem& sys, double alpha1, double c1, double c2) {
  check_amplitude(c1);
  check_amplitude(c2);
  switch (classify(sys, alpha1)) {
    case PathFlag::AlphaSingular:
      throw Error(ErrorCode::AlphaSingular, "alpha1 is pi (mod 2 pi): tan(alpha1/2) diverges");
    case PathFlag::NoBoundState:
      throw Error(ErrorCode::NoBoundState, "requires tan(alpha1/2) > 0 and tan^2(alpha1/2) > sigma");
    case PathFlag::NonNormalizable:
      throw Error(ErrorCode::NoBoundState, "tan^2(alpha1/2) = sigma gives kappa2 = 0 (not square integrable)");
    case PathFlag::Ok:
      break;
  }
  BipartiteBoundState st;
  const double t1 = std::tan(0.5 * alpha1);
  const double t2 = std::sqrt(t1 * t1 - sys.sigma());
  st.alpha1 = alpha1;
  st.alpha2 = 2.0 * std::atan(t2);
  st.energy = sys.lambda1 - t1 * t1;
  const double t2b = std::tan(0.5 * st.alpha2);
  st.energy_from_alpha2 = sys.lambda2 - t2b * t2b;
  st.kappa1 = std::sqrt(sys.lambda1 - st.energy);
  st.kappa2 = std::sqrt(sys.lambda2 - st.energy);
  schmidt_from_gram(st.kappa1, st.kappa2, c1, c2, st);
  return st;
}

BoundaryUnitary bound_state_unitary(const BipartiteBoundState& st) {
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 0) = std::polar(1.0, -st.alpha1);
  u(1, 1) = std::polar(1.0, -st.alpha2);
  return BoundaryUnitary::from_matrix(u);
}

CompatibilityCurve compatibility_curve(double sigma, const std::vector<double>& alpha1_samples) {
  if (!(std::isfinite(sigma) && sigma >= 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be finite and >= 0");
  CompatibilityCurve curve;
  for (double a1 : alpha1_samples) {
    if (!std::isfinite(a1)) {
      curve.omitted.push_back({a1, "alpha1 not finite"});
      continue;
    }
    if (near_pi(a1)) {
      curve.omitted.push_back({a1, "alpha1 = pi: tan(alpha1/2) diverges"});
      continue;
    }
    const double t = std::tan(0.5 * a1);
    const double margin = t * t - sigma;
    if (margin < 0) {
      curve.omitted.push_back({a1, "tan^2(alpha1/2) < sigma"});
      continue;
    }
    curve.points.push_back({a1, 2.0 * std::atan(std::sqrt(margin))});
  }
  return curve;
}

std::string_view to_string(PathFlag flag) {
  switch (flag) {
    case PathFlag::Ok: return "ok";
    case PathFlag::NoBoundState: return "no_bound_state";
    case PathFlag::NonNormalizable: return "non_normalizable";
    case PathFlag::AlphaSingular: return "alpha_singular";
  }
  return "unknown";
}

std::vector<PathSample> adiabatic_path(const BipartiteSystem& sys, const std::vector<double>& s_samples, double c1,
                                       double c2) {
  check_amplitude(c1);
  check_amplitude(c2);
  std::vector<PathSample> out;
  out.reserve(s_samples.size());
  for (double s : s_samples) {
    PathSample p;
    p.s = s;
    p.flag = std::isfinite(s) ? classify(sys, 2.0 * s) : PathFlag::NoBoundState;
    if (p.flag == PathFlag::Ok) p.state = bound_state(sys, 2.0 * s, c1, c2);
    out.push_back(p);
  }
  return out;
}

SeparabilityResult separability_test(const BipartiteSystem& sys, const BoundaryUnitary& boundary, double evolve_time,
                                     const SeparabilityOptions& opts) {
  if (!(std::isfinite(evolve_time) && evolve_time >= 0))
    throw Error(ErrorCode::InvalidArgument, "evolve_time must be finite and >= 0");
  if (opts.n_times < 1) throw Error(ErrorCode::InvalidArgument, "n_times must be >= 1");
  if (boundary.no_gap()) throw Error(ErrorCode::NoGap, "boundary unitary has no gap at -1");

  BoundaryUnitary full;
  if (boundary.dim() == 2) {
    CMatrix u = -CMatrix::Identity(4, 4);
    u.topLeftCorner(2, 2) = boundary.matrix();
    full = BoundaryUnitary::from_matrix(u);
  } else if (boundary.dim() == 4) {
    full = boundary;
  } else {
    throw Error(ErrorCode::DimensionMismatch, "separability_test expects a 2 x 2 or 4 x 4 boundary unitary");
  }

  const FEMAssembly fem = assemble_multichannel(opts.length, opts.n_elements, full, {sys.lambda1, sys.lambda2});
  const SpectralResult spec = solve_all(fem);
  const CMatrix& v = spec.eigenvectors;
  const Eigen::Index n_nodes = fem.nodes.size();
  const CMatrix mass = fem.mass.cast<cplx>();

  CVector psi0 = CVector::Zero(fem.dofs());
  for (Eigen::Index p = 0; p < n_nodes; ++p) {
    const double f = std::sin(kPi * fem.nodes(p) / opts.length) / std::sqrt(2.0);
    psi0(2 * p) = f;
    psi0(2 * p + 1) = f;
  }
  psi0(2 * (n_nodes - 1)) = psi0(2 * (n_nodes - 1) + 1) = 0.0;
  const CVector coeff = v.adjoint() * (mass * psi0);

  // Per-channel 1D mass applied to a channel slice.
  const double h = fem.nodes(1) - fem.nodes(0);
  auto mass1 = [&](const CVector& f) {
    CVector out(n_nodes);
    for (Eigen::Index p = 0; p < n_nodes; ++p) {
      const bool edge = p == 0 || p == n_nodes - 1;
      out(p) = (edge ? h / 3.0 : 2.0 * h / 3.0) * f(p);
      if (p > 0) out(p) += h / 6.0 * f(p - 1);
      if (p + 1 < n_nodes) out(p) += h / 6.0 * f(p + 1);
    }
    return out;
  };

  SeparabilityResult res;
  const RVector energies = Eigen::Map<const RVector>(spec.eigenvalues.data(), static_cast<Eigen::Index>(spec.eigenvalues.size()));
  for (int k = 0; k < opts.n_times; ++k) {
    const double t = opts.n_times == 1 ? 0.0 : evolve_time * k / (opts.n_times - 1);
    CVector c(coeff.size());
    for (Eigen::Index j = 0; j < coeff.size(); ++j) c(j) = std::polar(1.0, -energies(j) * t) * coeff(j);
    const CVector psi = v * c;
    CVector f0(n_nodes), f1(n_nodes);
    for (Eigen::Index p = 0; p < n_nodes; ++p) {
      f0(p) = psi(2 * p);
      f1(p) = psi(2 * p + 1);
    }
    Eigen::Matrix2cd rho;
    const CVector m0 = mass1(f0);
    const CVector m1 = mass1(f1);
    rho(0, 0) = f0.dot(m0);
    rho(1, 1) = f1.dot(m1);
    rho(0, 1) = f0.dot(m1);
    rho(1, 0) = std::conj(rho(0, 1));
    const double tr = rho.trace().real();
    rho /= tr;
    // Unit-trace Hermitian 2x2: p_small = det / p_large avoids cancellation.
    const double det = (rho(0, 0).real() * rho(1, 1).real()) - std::norm(rho(0, 1));
    const double p_large = 0.5 + std::sqrt(std::max(0.0, 0.25 - det));
    const double p_small = std::max(0.0, det / p_large);
    const double s = numeric::entropy({1.0 - p_small, p_small});
    res.times.push_back(t);
    res.entropies.push_back(s);
    res.max_entropy = std::max(res.max_entropy, s);
  }
  res.separable = res.max_entropy <= opts.threshold;
  return res;
}

}  // namespace saext
