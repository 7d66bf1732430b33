#include "saext/quadform1d.hpp"

#include "saext/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace saext {

namespace {

// Dof indices of the boundary trace, in trace order.
std::vector<Eigen::Index> boundary_dofs(const FEMAssembly& a) {
  const Eigen::Index last = a.nodes.size() - 1;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index node : {Eigen::Index{0}, last})
    for (int c = 0; c < a.channels; ++c) idx.push_back(node * a.channels + c);
  return idx;
}

std::vector<Eigen::Index> interior_dofs(const FEMAssembly& a) {
  const Eigen::Index n_nodes = a.nodes.size();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index node = 1; node + 1 < n_nodes; ++node)
    for (int c = 0; c < a.channels; ++c) idx.push_back(node * a.channels + c);
  return idx;
}

// The boundary part of Z in trace coordinates.
const CMatrix& boundary_block(const FEMAssembly& a) { return a.boundary.complement_basis(); }

// Z^H X Z without forming Z, using that Z = [interior unit vectors | E^H C].
CMatrix reduce(const FEMAssembly& a, const CMatrix& full) {
  const auto in = interior_dofs(a);
  const auto bd = boundary_dofs(a);
  const CMatrix& c = boundary_block(a);
  const Eigen::Index ni = static_cast<Eigen::Index>(in.size());
  const Eigen::Index nb = c.cols();
  CMatrix r(ni + nb, ni + nb);
  r.topLeftCorner(ni, ni) = full(in, in);
  if (nb > 0) {
    const CMatrix ib = full(in, bd) * c;
    r.topRightCorner(ni, nb) = ib;
    r.bottomLeftCorner(nb, ni) = c.adjoint() * full(bd, in);
    r.bottomRightCorner(nb, nb) = c.adjoint() * full(bd, bd) * c;
  }
  return r;
}

CVector lift(const FEMAssembly& a, const CVector& y) {
  const auto in = interior_dofs(a);
  const auto bd = boundary_dofs(a);
  const CMatrix& c = boundary_block(a);
  CVector v = CVector::Zero(a.dofs());
  const Eigen::Index ni = static_cast<Eigen::Index>(in.size());
  for (Eigen::Index k = 0; k < ni; ++k) v(in[k]) = y(k);
  if (c.cols() > 0) {
    const CVector vb = c * y.tail(c.cols());
    for (std::size_t k = 0; k < bd.size(); ++k) v(bd[k]) = vb(static_cast<Eigen::Index>(k));
  }
  return v;
}

Eigen::Index reduced_dim(const FEMAssembly& a) {
  return static_cast<Eigen::Index>(interior_dofs(a).size()) + boundary_block(a).cols();
}

// Phase that makes the largest-magnitude entry (first one on ties) real positive.
cplx canonical_phase(const CVector& v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best * (1.0 + 1e-12)) {
      best = m;
      imax = i;
    }
  }
  return best > 0 ? std::conj(v(imax)) / best : cplx(1.0);
}

bool is_real(const CMatrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

SpectralResult solve_impl(const FEMAssembly& a, Eigen::Index n_eigs) {
  const CMatrix kr = a.reduced_form();
  const CMatrix mr = a.reduced_mass();
  const Eigen::Index dim = kr.rows();
  if (n_eigs < 0 || n_eigs > dim)
    throw Error(ErrorCode::InvalidArgument,
                "n_eigs = " + std::to_string(n_eigs) + " exceeds the constrained dimension " + std::to_string(dim));

  RVector evals;
  CMatrix evecs;
  if (is_real(kr) && is_real(mr)) {
    Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> es(kr.real(), mr.real(),
                                                         Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
      throw Error(ErrorCode::SolverFailure, "real generalized eigensolver failed (mass matrix not positive definite?)");
    evals = es.eigenvalues();
    evecs = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(kr, mr, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
      throw Error(ErrorCode::SolverFailure, "complex generalized eigensolver failed (mass matrix not positive definite?)");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  }

  SpectralResult res;
  res.mesh_n = static_cast<int>(a.nodes.size()) - 1;
  res.eigenvectors.resize(a.dofs(), n_eigs);
  for (Eigen::Index j = 0; j < n_eigs; ++j) {
    CVector y = evecs.col(j);
    CVector v = lift(a, y);
    const cplx phase = canonical_phase(v);
    v *= phase;
    y *= phase;
    const double e = evals(j);
    const CVector my = mr * y;
    const double den = my.norm();
    res.eigenvalues.push_back(e);
    res.residuals.push_back(den > 0 ? (kr * y - e * my).norm() / den : 0.0);
    res.eigenvectors.col(j) = v;
  }
  return res;
}

void validate_mesh(double L, int n_elements) {
  if (!(std::isfinite(L) && L > 0)) throw Error(ErrorCode::InvalidArgument, "L must be positive and finite");
  if (n_elements < 4) throw Error(ErrorCode::InvalidArgument, "n_elements must be >= 4");
}

}  // namespace

CMatrix FEMAssembly::form_matrix() const {
  CMatrix k = (stiffness + potential).cast<cplx>();
  k += boundary_correction;
  return k;
}

CMatrix FEMAssembly::reduced_form() const {
  CMatrix r = reduce(*this, form_matrix());
  return 0.5 * (r + r.adjoint());
}

CMatrix FEMAssembly::reduced_mass() const {
  CMatrix r = reduce(*this, mass.cast<cplx>());
  return 0.5 * (r + r.adjoint());
}

FEMAssembly assemble(double L, int n_elements, const BoundaryUnitary& bu, const std::vector<double>& potential) {
  return assemble_multichannel(L, n_elements, bu, {0.0}, potential);
}

FEMAssembly assemble_multichannel(double L, int n_elements, const BoundaryUnitary& bu,
                                  const std::vector<double>& channel_shifts, const std::vector<double>& potential) {
  validate_mesh(L, n_elements);
  const int ch = static_cast<int>(channel_shifts.size());
  if (ch < 1) throw Error(ErrorCode::InvalidArgument, "at least one channel is required");
  if (bu.dim() != 2 * ch)
    throw Error(ErrorCode::DimensionMismatch, "boundary unitary must be " + std::to_string(2 * ch) + " x " +
                                                  std::to_string(2 * ch) + " for " + std::to_string(ch) +
                                                  " channel(s)");
  for (double s : channel_shifts)
    if (!std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "channel shifts must be finite");
  const Eigen::Index n_nodes = n_elements + 1;
  if (!potential.empty()) {
    if (static_cast<Eigen::Index>(potential.size()) != n_nodes)
      throw Error(ErrorCode::InvalidArgument, "potential must be sampled at the n_elements + 1 nodes");
    for (double v : potential)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "potential samples must be finite");
  }

  FEMAssembly a;
  a.channels = ch;
  a.boundary = bu;
  a.nodes = RVector::LinSpaced(n_nodes, 0.0, L);
  const double h = L / n_elements;
  const Eigen::Index dofs = n_nodes * ch;
  a.stiffness = RMatrix::Zero(dofs, dofs);
  a.mass = RMatrix::Zero(dofs, dofs);
  a.potential = RMatrix::Zero(dofs, dofs);

  for (Eigen::Index e = 0; e < n_elements; ++e) {
    for (int c = 0; c < ch; ++c) {
      const Eigen::Index i = e * ch + c;
      const Eigen::Index j = (e + 1) * ch + c;
      a.stiffness(i, i) += 1.0 / h;
      a.stiffness(j, j) += 1.0 / h;
      a.stiffness(i, j) -= 1.0 / h;
      a.stiffness(j, i) -= 1.0 / h;
      a.mass(i, i) += h / 3.0;
      a.mass(j, j) += h / 3.0;
      a.mass(i, j) += h / 6.0;
      a.mass(j, i) += h / 6.0;
    }
  }

  double floor = *std::min_element(channel_shifts.begin(), channel_shifts.end());
  for (int c = 0; c < ch; ++c) {
    if (channel_shifts[c] == 0.0) continue;
    for (Eigen::Index p = 0; p < n_nodes; ++p)
      for (Eigen::Index q = std::max<Eigen::Index>(0, p - 1); q <= std::min(n_nodes - 1, p + 1); ++q)
        a.potential(p * ch + c, q * ch + c) += channel_shifts[c] * a.mass(p * ch + c, q * ch + c);
  }
  if (!potential.empty()) {
    for (Eigen::Index p = 0; p < n_nodes; ++p) {
      const double w = (p == 0 || p == n_nodes - 1) ? 0.5 * h : h;
      for (int c = 0; c < ch; ++c) a.potential(p * ch + c, p * ch + c) += w * potential[p];
    }
    // Trapezoid weights W satisfy M <= W <= 3M, which bounds the lumped term
    // from below by a multiple of the consistent mass.
    const double vmin = *std::min_element(potential.begin(), potential.end());
    floor += vmin >= 0 ? vmin : 3.0 * vmin;
  }
  a.potential_floor = floor;

  const auto bd = boundary_dofs(a);
  const CMatrix a_full = bu.cayley_full();
  a.boundary_correction = CMatrix::Zero(dofs, dofs);
  for (std::size_t p = 0; p < bd.size(); ++p)
    for (std::size_t q = 0; q < bd.size(); ++q)
      a.boundary_correction(bd[p], bd[q]) = -a_full(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));

  const auto in = interior_dofs(a);
  const CMatrix& c = boundary_block(a);
  const Eigen::Index ni = static_cast<Eigen::Index>(in.size());
  a.constrained_basis = CMatrix::Zero(dofs, ni + c.cols());
  for (Eigen::Index k = 0; k < ni; ++k) a.constrained_basis(in[k], k) = 1.0;
  for (Eigen::Index k = 0; k < c.cols(); ++k)
    for (std::size_t p = 0; p < bd.size(); ++p) a.constrained_basis(bd[p], ni + k) = c(static_cast<Eigen::Index>(p), k);
  a.constraint = a.constrained_basis * a.constrained_basis.adjoint();
  return a;
}

SpectralResult solve(const FEMAssembly& asm_, int n_eigs) { return solve_impl(asm_, n_eigs); }

SpectralResult solve_all(const FEMAssembly& asm_) { return solve_impl(asm_, reduced_dim(asm_)); }

double robin_ground_energy(double L, double K) {
  if (!(K > 0)) return 0.0;
  // kappa tanh(kappa L/2) - K is increasing in kappa, and kappa = K + 2/L overshoots.
  const double hi = K + 2.0 / L;
  const double kappa = numeric::bisect([&](double k) { return k * std::tanh(0.5 * k * L) - K; }, 0.0, hi, 1e-15);
  return -kappa * kappa;
}

SemiboundEstimate semibound_estimate(const FEMAssembly& asm_, int n_samples, std::uint64_t seed) {
  if (asm_.boundary.no_gap()) throw Error(ErrorCode::NoGap, "boundary unitary has no gap at -1");
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  const CMatrix kr = asm_.reduced_form();
  const CMatrix mr = asm_.reduced_mass();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const auto quotient = [&](const CVector& y) { return y.dot(kr * y).real() / y.dot(mr * y).real(); };
  const Eigen::Index nn = asm_.nodes.size();
  const int ch = asm_.channels;
  const double length = asm_.nodes(nn - 1);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    if (s % 2 == 0) {
      best = std::min(best, quotient(numeric::random_cvector(static_cast<int>(kr.rows()), rng)));
      continue;
    }
    // smooth trial: a few random cosine modes per channel, projected onto the form domain
    CVector v(asm_.dofs());
    std::vector<cplx> c(static_cast<std::size_t>(4 * ch));
    for (auto& z : c) z = cplx(gauss(rng), gauss(rng));
    for (Eigen::Index i = 0; i < nn; ++i)
      for (int a = 0; a < ch; ++a) {
        cplx val = 0.0;
        for (int k = 0; k < 4; ++k) val += c[static_cast<std::size_t>(4 * a + k)] * std::cos(k * kPi * asm_.nodes(i) / length);
        v(i * ch + a) = val;
      }
    const CVector y = asm_.constrained_basis.adjoint() * v;
    if (y.norm() > 0) best = std::min(best, quotient(y));
  }
  // the discrete ground state realizes the infimum of all quotients
  best = std::min(best, solve(asm_, 1).eigenvalues.front());
  const double k_norm = numeric::operator_norm(asm_.boundary.cayley());
  SemiboundEstimate out;
  out.lower_bound_estimate = best;
  out.robin_constant = k_norm;
  out.certified_bound = robin_ground_energy(length, k_norm) + asm_.potential_floor;
  out.holds = out.lower_bound_estimate >= out.certified_bound - 1e-9;
  return out;
}

RepresentationReport representing_operator_check(const FEMAssembly& asm_, const SpectralResult& result, int n_tests,
                                                 std::uint64_t seed, double tol) {
  RepresentationReport rep;
  const CMatrix k = asm_.form_matrix();
  const CMatrix m = asm_.mass.cast<cplx>();
  // defects are measured against H1 norms, which stay meaningful for E = 0
  const CMatrix h1 = (asm_.stiffness + asm_.mass).cast<cplx>();
  const Eigen::Index r = reduced_dim(asm_);
  std::mt19937_64 rng(seed);
  std::vector<CVector> tests;
  for (int t = 0; t < n_tests; ++t) tests.push_back(lift(asm_, numeric::random_cvector(static_cast<int>(r), rng)));

  const double h = asm_.nodes(1) - asm_.nodes(0);
  const Eigen::Index last = asm_.nodes.size() - 1;
  const int ch = asm_.channels;
  for (std::size_t j = 0; j < result.eigenvalues.size(); ++j) {
    const CVector v = result.eigenvectors.col(static_cast<Eigen::Index>(j));
    const double e = result.eigenvalues[j];
    const CVector kv = k * v;
    const CVector mv = m * v;
    for (int t = 0; t < n_tests; ++t) {
      const CVector& u = tests[t];
      const cplx q = u.dot(kv);
      const cplx p = u.dot(mv);
      const double scale = std::sqrt(u.dot(h1 * u).real() * v.dot(h1 * v).real());
      const double defect = scale > 0 ? std::abs(q - e * p) / scale : std::abs(q - e * p);
      rep.max_relative_defect = std::max(rep.max_relative_defect, defect);
      if (!(defect <= tol)) {
        rep.passed = false;
        rep.violations.push_back({static_cast<int>(j), t, defect});
      }
    }
    CVector nt(2 * ch);
    for (int c = 0; c < ch; ++c) {
      nt(c) = -(v(1 * ch + c) - v(c)) / h;
      nt(ch + c) = (v(last * ch + c) - v((last - 1) * ch + c)) / h;
    }
    rep.normal_traces.push_back(nt);
  }
  return rep;
}

}  // namespace saext
