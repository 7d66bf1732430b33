#include "saext/symmetry_reduction.hpp"

#include "saext/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace saext {

namespace {

void require_unitary(const CMatrix& u, const char* what) {
  if (u.rows() != u.cols() || u.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be a non-empty square matrix");
  const double defect = (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
  if (!(defect <= kUnitaryTol))
    throw Error(ErrorCode::NonUnitary, std::string(what) + ": ||U^H U - I|| = " + numeric::format_double(defect));
}

CMatrix v_matrix(int n_modes, int radial_dim, double alpha) {
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * n_modes + 1) * radial_dim;
  CMatrix v = CMatrix::Zero(dim, dim);
  for (int n = -n_modes; n <= n_modes; ++n)
    for (int j = 0; j < radial_dim; ++j) {
      const Eigen::Index k = static_cast<Eigen::Index>(n + n_modes) * radial_dim + j;
      v(k, k) = std::polar(1.0, n * alpha);
    }
  return v;
}

// Largest invariance defect of the boundary form of `bu` over random domain pairs.
double form_defect(const BoundaryUnitary& bu, const GroupRep& rep, int n_random, std::mt19937_64& rng) {
  const CMatrix a = bu.cayley_full();
  const CMatrix pw = bu.w_projector();
  const Eigen::Index dim = bu.dim();
  const CMatrix perp = CMatrix::Identity(dim, dim) - pw;
  const auto q = [&](const CVector& x, const CVector& y) { return -(perp * x).dot(a * (perp * y)); };
  double worst = 0.0;
  for (int k = 0; k < n_random; ++k) {
    const CVector phi = perp * numeric::random_cvector(static_cast<int>(dim), rng);
    const CVector psi = perp * numeric::random_cvector(static_cast<int>(dim), rng);
    const double scale = phi.norm() * psi.norm();
    for (const CMatrix& v : rep.matrices) {
      const CVector vphi = v * phi;
      const CVector vpsi = v * psi;
      worst = std::max(worst, std::abs(q(vphi, vpsi) - q(phi, psi)) / scale);
      worst = std::max(worst, (pw * vphi).norm() / phi.norm());
    }
  }
  return worst;
}

}  // namespace

GroupRep GroupRep::u1(int n_modes, int radial_dim, const std::vector<double>& samples) {
  if (n_modes < 0 || radial_dim < 1) throw Error(ErrorCode::InvalidArgument, "need n_modes >= 0 and radial_dim >= 1");
  GroupRep rep;
  rep.n_modes = n_modes;
  rep.radial_dim = radial_dim;
  rep.sample_elements = samples;
  for (double a : samples) {
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "group samples must be finite");
    rep.matrices.push_back(v_matrix(n_modes, radial_dim, a));
  }
  return rep;
}

CMatrix GroupRep::at(double alpha) const { return v_matrix(n_modes, radial_dim, alpha); }

AdmissibleUnitary build_admissible(const CMatrix& radial_factor, const std::vector<double>& phases) {
  require_unitary(radial_factor, "radial factor");
  if (phases.size() % 2 == 0) throw Error(ErrorCode::InvalidArgument, "phases must have odd length 2N + 1");
  for (double b : phases)
    if (!std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "phases must be finite");
  const int n_modes = static_cast<int>(phases.size() / 2);
  const Eigen::Index m = radial_factor.rows();
  AdmissibleUnitary out;
  out.radial_factor = radial_factor;
  out.phases = phases;
  out.assembled = CMatrix::Zero(static_cast<Eigen::Index>(phases.size()) * m, static_cast<Eigen::Index>(phases.size()) * m);
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const CMatrix block = std::polar(1.0, phases[k]) * radial_factor;
    out.assembled.block(static_cast<Eigen::Index>(k) * m, static_cast<Eigen::Index>(k) * m, m, m) = block;
    if (BoundaryUnitary::from_matrix(block).no_gap()) out.gapless_modes.push_back(static_cast<int>(k) - n_modes);
  }
  const BoundaryUnitary bu = BoundaryUnitary::from_matrix(out.assembled);
  out.gap_delta = bu.gap_delta();
  out.has_gap = !bu.no_gap();
  return out;
}

CommutantResult commutant_check(const CMatrix& u_matrix, const GroupRep& rep) {
  if (u_matrix.rows() != rep.dim() || u_matrix.cols() != rep.dim())
    throw Error(ErrorCode::DimensionMismatch, "unitary does not act on the representation space");
  double worst = 0.0;
  for (const CMatrix& v : rep.matrices) worst = std::max(worst, numeric::operator_norm(u_matrix * v - v * u_matrix));
  return {worst, worst <= kCommutantTol};
}

CMatrix mode_shift(int n_modes, int radial_dim) {
  const Eigen::Index blocks = 2 * n_modes + 1;
  const Eigen::Index dim = blocks * radial_dim;
  CMatrix s = CMatrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index to = (b + 1) % blocks;
    for (int j = 0; j < radial_dim; ++j) s(to * radial_dim + j, b * radial_dim + j) = 1.0;
  }
  return s;
}

FormInvarianceReport invariance_of_form_check(const CMatrix& u_matrix, const GroupRep& rep, int n_random,
                                              std::uint64_t seed) {
  if (u_matrix.rows() != rep.dim() || u_matrix.cols() != rep.dim())
    throw Error(ErrorCode::DimensionMismatch, "unitary does not act on the representation space");
  if (n_random < 1) throw Error(ErrorCode::InvalidArgument, "n_random must be >= 1");
  std::mt19937_64 rng(seed);
  FormInvarianceReport rep_out;
  rep_out.max_defect = form_defect(BoundaryUnitary::from_matrix(u_matrix), rep, n_random, rng);
  rep_out.pass = rep_out.max_defect <= kFormInvarianceTol;
  const CMatrix shifted = mode_shift(rep.n_modes, rep.radial_dim) * u_matrix;
  rep_out.negative_control_defect = form_defect(BoundaryUnitary::from_matrix(shifted), rep, n_random, rng);
  return rep_out;
}

FormInvarianceReport invariance_of_form_check(const AdmissibleUnitary& admissible, const GroupRep& rep, int n_random,
                                              std::uint64_t seed) {
  return invariance_of_form_check(admissible.assembled, rep, n_random, seed);
}

SpectralResult disk_mode_spectrum(int m, double robin_c, int n_elements, int n_eigs, int n_modes) {
  if (std::abs(m) > n_modes) throw Error(ErrorCode::InvalidArgument, "|m| exceeds the Fourier truncation");
  if (n_elements < 8) throw Error(ErrorCode::InvalidArgument, "n_elements must be >= 8");
  if (std::isnan(robin_c) || robin_c == std::numeric_limits<double>::infinity())
    throw Error(ErrorCode::InvalidArgument, "robin_c must be finite or -infinity (Dirichlet)");
  const bool dirichlet = std::isinf(robin_c);
  const double m2 = static_cast<double>(m) * m;
  const Eigen::Index n_nodes = n_elements + 1;
  const double h = 1.0 / n_elements;

  RMatrix k = RMatrix::Zero(n_nodes, n_nodes);
  RMatrix mass = RMatrix::Zero(n_nodes, n_nodes);
  std::vector<double> gx, gw;
  numeric::gauss_legendre(10, gx, gw);
  for (Eigen::Index e = 0; e < n_elements; ++e) {
    const double a = e * h;
    const double rbar = a + 0.5 * h;
    const Eigen::Index i = e, j = e + 1;
    k(i, i) += rbar / h;
    k(j, j) += rbar / h;
    k(i, j) -= rbar / h;
    k(j, i) -= rbar / h;
    mass(i, i) += h * (a / 3.0 + h / 12.0);
    mass(j, j) += h * (a / 3.0 + h / 4.0);
    mass(i, j) += h * (a / 6.0 + h / 12.0);
    mass(j, i) += h * (a / 6.0 + h / 12.0);
    if (m2 == 0.0) continue;
    if (e == 0) {
      // Only the outer hat survives f(0) = 0; int_0^h (r/h)^2 / r dr = 1/2.
      k(j, j) += m2 * 0.5;
      continue;
    }
    double ii = 0, jj = 0, ij = 0;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double t = 0.5 * (gx[q] + 1.0);
      const double r = a + h * t;
      const double w = 0.5 * h * gw[q] / r;
      ii += w * (1 - t) * (1 - t);
      jj += w * t * t;
      ij += w * t * (1 - t);
    }
    k(i, i) += m2 * ii;
    k(j, j) += m2 * jj;
    k(i, j) += m2 * ij;
    k(j, i) += m2 * ij;
  }
  if (!dirichlet) k(n_nodes - 1, n_nodes - 1) -= robin_c;

  std::vector<Eigen::Index> keep;
  for (Eigen::Index p = 0; p < n_nodes; ++p) {
    if (p == 0 && m != 0) continue;
    if (p == n_nodes - 1 && dirichlet) continue;
    keep.push_back(p);
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(keep.size());
  if (n_eigs < 1 || n_eigs > dim) throw Error(ErrorCode::InvalidArgument, "n_eigs out of range");
  const RMatrix kr = k(keep, keep);
  const RMatrix mr = mass(keep, keep);
  Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> es(kr, mr, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "radial generalized eigensolver failed");

  SpectralResult res;
  res.mesh_n = n_elements;
  res.eigenvectors = CMatrix::Zero(n_nodes, n_eigs);
  for (int j = 0; j < n_eigs; ++j) {
    RVector y = es.eigenvectors().col(j);
    Eigen::Index imax;
    y.cwiseAbs().maxCoeff(&imax);
    if (y(imax) < 0) y = -y;
    const double e = es.eigenvalues()(j);
    const RVector my = mr * y;
    res.eigenvalues.push_back(e);
    res.residuals.push_back((kr * y - e * my).norm() / my.norm());
    for (Eigen::Index p = 0; p < dim; ++p) res.eigenvectors(keep[p], j) = y(p);
  }
  return res;
}

CornerReport corner_singularity(double theta_opening, double epsilon, int n_quad) {
  if (!(theta_opening > 0 && theta_opening < 2 * kPi))
    throw Error(ErrorCode::InvalidArgument, "theta_opening must lie in (0, 2 pi)");
  if (!(epsilon > 0 && epsilon < 0.1)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 0.1)");
  if (n_quad < 1000) throw Error(ErrorCode::InvalidArgument, "n_quad must be >= 1000");

  CornerReport rep;
  rep.theta_opening = theta_opening;
  const double a = kPi / theta_opening;
  rep.exponent = a;

  std::vector<double> gx, gw;
  numeric::gauss_legendre(10, gx, gw);
  const int panels = n_quad / 10;

  // Composite Gauss nodes and weights on [lo, hi].
  const auto rule = [&](double lo, double hi, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    const double ph = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p)
      for (std::size_t q = 0; q < gx.size(); ++q) {
        x.push_back(lo + ph * (p + 0.5 * (gx[q] + 1.0)));
        w.push_back(0.5 * ph * gw[q]);
      }
  };

  std::vector<double> th, thw;
  rule(0.0, theta_opening, th, thw);
  std::vector<double> sn(th.size()), cs(th.size()), sa(th.size()), ca(th.size());
  for (std::size_t j = 0; j < th.size(); ++j) {
    sn[j] = std::sin(th[j]);
    cs[j] = std::cos(th[j]);
    sa[j] = std::sin(a * th[j]);
    ca[j] = std::cos(a * th[j]);
  }

  double harmonic = 0.0;
  for (int level = 0; level < 3; ++level) {
    const double eps = epsilon * std::pow(10.0, -level);
    std::vector<double> s, sw;
    rule(std::log(eps), 0.0, s, sw);
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double r = std::exp(s[i]);
      const double ra2 = std::pow(r, a - 2.0);  // r^{a-2}
      double inner = 0.0;
      for (std::size_t j = 0; j < th.size(); ++j) {
        const double f_rr = a * (a - 1.0) * ra2 * sa[j];
        const double f_r_over_r = a * ra2 * sa[j];
        const double f_tt_over_r2 = -a * a * ra2 * sa[j];
        const double f_t_over_r2 = a * ra2 * ca[j];
        const double f_rt_over_r = a * a * ra2 * ca[j];
        if (level == 0) {
          const double lap = f_rr + f_r_over_r + f_tt_over_r2;
          const double mag = std::abs(f_rr) + std::abs(f_r_over_r) + std::abs(f_tt_over_r2);
          if (mag > 0) harmonic = std::max(harmonic, std::abs(lap) / mag);
        }
        const double c2 = cs[j] * cs[j], s2 = sn[j] * sn[j], sc = sn[j] * cs[j];
        const double tang = f_r_over_r + f_tt_over_r2;
        const double mixed = f_rt_over_r - f_t_over_r2;
        const double fxx = c2 * f_rr + s2 * tang - 2.0 * sc * mixed;
        const double fyy = s2 * f_rr + c2 * tang + 2.0 * sc * mixed;
        const double fxy = sc * (f_rr - tang) + (c2 - s2) * mixed;
        inner += thw[j] * (fxx * fxx + 2.0 * fxy * fxy + fyy * fyy);
      }
      total += sw[i] * r * r * inner;  // dr = r ds, area element r dr
    }
    rep.epsilons.push_back(eps);
    rep.integrals.push_back(total);
  }
  rep.harmonic_residual = harmonic;

  for (int i = 0; i <= 200; ++i) {
    const double r = std::max(rep.epsilons.back(), i / 200.0);
    rep.edge_trace_max = std::max(rep.edge_trace_max, std::abs(std::pow(r, a) * std::sin(0.0)));
    rep.edge_trace_max = std::max(rep.edge_trace_max, std::abs(std::pow(r, a) * std::sin(a * theta_opening)));
  }

  const double peak = *std::max_element(rep.integrals.begin(), rep.integrals.end());
  if (!(peak > 0)) {
    rep.h2_class = H2Class::Finite;
    rep.h2_value = 0.0;
    rep.slope = 0.0;
    return rep;
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < rep.integrals.size(); ++k) {
    lx.push_back(std::log(rep.epsilons[k]));
    ly.push_back(std::log(rep.integrals[k]));
  }
  rep.slope = numeric::fit_slope(lx, ly);
  if (std::abs(rep.slope) < 0.05) {
    rep.h2_class = H2Class::Finite;
    const double i1 = rep.integrals[0], i2 = rep.integrals[1], i3 = rep.integrals[2];
    const double d1 = i2 - i1, d2 = i3 - i2;
    const double denom = d2 - d1;
    // Aitken extrapolation, skipped once the differences are at rounding level.
    rep.h2_value = (std::abs(denom) > 1e-14 * std::abs(i3) && std::abs(d2) > 1e-14 * std::abs(i3))
                       ? i3 - d2 * d2 / denom
                       : i3;
  } else {
    rep.h2_class = H2Class::Divergent;
    rep.divergence_rate = -rep.slope;
  }
  return rep;
}

}  // namespace saext
