#include "saext/dirac1d.hpp"

#include "saext/boundary_param.hpp"
#include "saext/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace saext {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

CMatrix sigma1() {
  CMatrix s = CMatrix::Zero(2, 2);
  s(0, 1) = s(1, 0) = 1.0;
  return s;
}

CVector e_plus() { return CVector::Constant(2, kInvSqrt2); }

CVector e_minus() {
  CVector v(2);
  v << kInvSqrt2, -kInvSqrt2;
  return v;
}

CMatrix fourier_matrix(int n_modes) {
  const int m = 2 * n_modes + 1;
  CMatrix f(m, m);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      const long n = k - n_modes;
      // Reduce n*j mod m first so the phase argument stays small and exact.
      const long r = ((n * j) % m + m) % m;
      f(j, k) = std::polar(norm, 2.0 * kPi * static_cast<double>(r) / m);
    }
  return f;
}

// Boundary system matrix acting on (a0, b0).
Eigen::Matrix2cd boundary_system(const DiracBoundarySetup& setup, double L, double E) {
  const CMatrix& u = setup.u_map;
  const cplx em = std::polar(1.0, -E * L);
  const cplx ep = std::polar(1.0, E * L);
  Eigen::Matrix2cd m;
  m(0, 0) = 1.0 - u(0, 1) * em;
  m(0, 1) = -u(0, 0);
  m(1, 0) = -u(1, 1) * em;
  m(1, 1) = ep - u(1, 0);
  return m;
}

struct ScanResult {
  std::vector<std::pair<double, double>> brackets;
  std::vector<double> node_roots;
  std::size_t count() const { return brackets.size() + node_roots.size(); }
};

ScanResult scan(const std::function<double(double)>& f, double lo, double hi, long cells) {
  ScanResult r;
  const double step = (hi - lo) / static_cast<double>(cells);
  double x0 = lo;
  double f0 = f(x0);
  if (f0 == 0.0) r.node_roots.push_back(x0);
  for (long i = 1; i <= cells; ++i) {
    const double x1 = i == cells ? hi : lo + step * static_cast<double>(i);
    const double f1 = f(x1);
    if (f1 == 0.0) {
      r.node_roots.push_back(x1);
    } else if (f0 != 0.0 && ((f0 > 0) != (f1 > 0))) {
      r.brackets.emplace_back(x0, x1);
    }
    x0 = x1;
    f0 = f1;
  }
  return r;
}

void check_hermitian(const CMatrix& m, const char* what) {
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() > 1e-12 * scale)
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not Hermitian");
}

double extreme_eigenvalue(const CMatrix& t, bool lowest) {
  if (t.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(t, Eigen::EigenvaluesOnly);
  return lowest ? es.eigenvalues()(0) : es.eigenvalues()(t.rows() - 1);
}

void finish_split(SectorSplit& s) {
  s.p_plus = s.basis_plus * s.basis_plus.adjoint();
  s.p_minus = s.basis_minus * s.basis_minus.adjoint();
  s.lambda_min_plus = extreme_eigenvalue(s.t_plus, true);
  s.lambda_max_minus = extreme_eigenvalue(s.t_minus, false);
}

}  // namespace

DiracBoundarySetup DiracBoundarySetup::interval(const CMatrix& u_map) {
  if (u_map.rows() != 2 || u_map.cols() != 2) throw Error(ErrorCode::DimensionMismatch, "u_map must be 2 x 2");
  const double defect = (u_map.adjoint() * u_map - CMatrix::Identity(2, 2)).norm();
  if (!(defect <= kUnitaryTol)) throw Error(ErrorCode::NonUnitary, "||U^H U - I|| = " + numeric::format_double(defect));

  DiracBoundarySetup s;
  s.u_map = u_map;
  s.j_matrix = CMatrix::Zero(4, 4);
  s.j_matrix.topLeftCorner(2, 2) = -kI * sigma1();
  s.j_matrix.bottomRightCorner(2, 2) = kI * sigma1();
  s.h_plus_basis = CMatrix::Zero(4, 2);
  s.h_plus_basis.block(0, 0, 2, 1) = e_minus();
  s.h_plus_basis.block(2, 1, 2, 1) = e_plus();
  s.h_minus_basis = CMatrix::Zero(4, 2);
  s.h_minus_basis.block(0, 0, 2, 1) = e_plus();
  s.h_minus_basis.block(2, 1, 2, 1) = e_minus();
  return s;
}

cplx boundary_form(const DiracBoundarySetup& setup, const CVector& phi, const CVector& psi) {
  if (phi.size() != 4 || psi.size() != 4) throw Error(ErrorCode::DimensionMismatch, "boundary data must have length 4");
  return (setup.j_matrix * phi).dot(psi);
}

CVector project_to_domain(const DiracBoundarySetup& setup, const CVector& phi) {
  if (phi.size() != 4) throw Error(ErrorCode::DimensionMismatch, "boundary data must have length 4");
  const CVector plus = setup.h_plus_basis.adjoint() * phi;
  return setup.h_plus_basis * plus + setup.h_minus_basis * (setup.u_map * plus);
}

double boundary_condition_defect(const DiracBoundarySetup& setup, const CVector& phi) {
  if (phi.size() != 4) throw Error(ErrorCode::DimensionMismatch, "boundary data must have length 4");
  const CVector plus = setup.h_plus_basis.adjoint() * phi;
  const CVector minus = setup.h_minus_basis.adjoint() * phi;
  return (minus - setup.u_map * plus).norm();
}

cplx secular_determinant(const DiracBoundarySetup& setup, double L, double E) {
  const CMatrix& u = setup.u_map;
  return std::polar(1.0, E * L) - (u(0, 1) + u(1, 0)) - u.determinant() * std::polar(1.0, -E * L);
}

double secular_function(const DiracBoundarySetup& setup, double L, double E) {
  const cplx s = std::sqrt(setup.u_map.determinant());
  const double b = (std::conj(s) * setup.u_map(0, 1)).imag();
  return std::sin(E * L - std::arg(s)) - b;
}

CMatrix circle_dirac_matrix(int n_modes) {
  if (n_modes < 0) throw Error(ErrorCode::InvalidArgument, "n_modes must be >= 0");
  const CMatrix f = fourier_matrix(n_modes);
  RVector symbol(2 * n_modes + 1);
  for (int k = 0; k < symbol.size(); ++k) symbol(k) = -(k - n_modes);
  return f * symbol.cast<cplx>().asDiagonal() * f.adjoint();
}

SpectralResult circle_dirac_spectrum(int n_modes) {
  if (n_modes < 0) throw Error(ErrorCode::InvalidArgument, "n_modes must be >= 0");
  const CMatrix f = fourier_matrix(n_modes);
  const CMatrix d = circle_dirac_matrix(n_modes);
  const int m = 2 * n_modes + 1;
  SpectralResult r;
  r.mesh_n = m;
  r.eigenvectors.resize(m, m);
  // E = -n ascending means n runs from n_modes down to -n_modes.
  for (int i = 0; i < m; ++i) {
    const int n = n_modes - i;
    const double e = -n;
    const CVector v = f.col(n + n_modes);
    r.eigenvalues.push_back(e);
    r.eigenvectors.col(i) = v;
    r.residuals.push_back((d * v - e * v).norm());
  }
  return r;
}

SpectralResult interval_dirac_spectrum(double L, const DiracBoundarySetup& setup, int n_eigs,
                                       std::pair<double, double> bracket) {
  if (!(std::isfinite(L) && L > 0)) throw Error(ErrorCode::InvalidArgument, "L must be positive and finite");
  if (n_eigs < 0) throw Error(ErrorCode::InvalidArgument, "n_eigs must be >= 0");
  const auto [lo, hi] = bracket;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    throw Error(ErrorCode::InvalidArgument, "bracket must be a finite interval with lo < hi");

  const auto f = [&](double e) { return secular_function(setup, L, e); };
  long cells = 10000;
  ScanResult coarse = scan(f, lo, hi, cells);
  bool stable = false;
  for (int halving = 0; halving < 6; ++halving) {
    ScanResult fine = scan(f, lo, hi, cells * 2);
    cells *= 2;
    const bool same = fine.count() == coarse.count();
    coarse = std::move(fine);
    if (same) {
      stable = true;
      break;
    }
  }
  if (!stable)
    throw Error(ErrorCode::BracketTooCoarse, "root count still changing after 6 halvings of the scan cell");

  std::vector<double> roots = coarse.node_roots;
  for (const auto& [a, b] : coarse.brackets) roots.push_back(numeric::bisect(f, a, b, 1e-13));
  std::sort(roots.begin(), roots.end());
  if (n_eigs > 0 && static_cast<int>(roots.size()) > n_eigs) {
    std::stable_sort(roots.begin(), roots.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    roots.resize(n_eigs);
    std::sort(roots.begin(), roots.end());
  }

  SpectralResult r;
  r.mesh_n = static_cast<int>(cells);
  r.eigenvectors.resize(2, static_cast<Eigen::Index>(roots.size()));
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const double e = roots[k];
    r.eigenvalues.push_back(e);
    r.residuals.push_back(std::abs(secular_determinant(setup, L, e)));
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(boundary_system(setup, L, e), Eigen::ComputeFullV);
    r.eigenvectors.col(static_cast<Eigen::Index>(k)) = svd.matrixV().col(1);
  }
  return r;
}

SectorSplit sector_split_position(const std::vector<double>& grid, const std::vector<double>& weights) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "position grid is empty");
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "weights must match the grid");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(grid[i])) throw Error(ErrorCode::InvalidArgument, "grid points must be finite");
    if (std::abs(grid[i] + grid[n - 1 - i]) > 1e-12 * std::max(1.0, std::abs(grid[i])))
      throw Error(ErrorCode::InvalidArgument, "position grid must be symmetric about 0");
    if (!weights.empty() && !(weights[i] > 0 && std::isfinite(weights[i])))
      throw Error(ErrorCode::InvalidArgument, "quadrature weights must be positive");
  }

  SectorSplit s;
  s.weights = weights.empty() ? RVector::Ones(n) : Eigen::Map<const RVector>(weights.data(), n).eval();
  s.q_matrix = CMatrix::Zero(n, n);
  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index i = 0; i < n; ++i) {
    s.q_matrix(i, i) = grid[i] * s.weights(i);
    (grid[i] > 0 ? plus : minus).push_back(i);
  }
  auto coordinate_block = [&](const std::vector<Eigen::Index>& idx, CMatrix& basis, CMatrix& t) {
    const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
    basis = CMatrix::Zero(n, k);
    t = CMatrix::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      basis(idx[j], j) = 1.0;
      t(j, j) = grid[idx[j]];
    }
  };
  coordinate_block(plus, s.basis_plus, s.t_plus);
  coordinate_block(minus, s.basis_minus, s.t_minus);
  finish_split(s);
  return s;
}

SectorSplit sector_split_momentum(int n_fourier) {
  if (n_fourier < 1 || n_fourier % 2 == 0) throw Error(ErrorCode::InvalidArgument, "n_fourier must be odd and >= 1");
  const int n_modes = (n_fourier - 1) / 2;
  const CMatrix f = fourier_matrix(n_modes);
  SectorSplit s;
  s.weights = RVector::Ones(n_fourier);
  s.q_matrix = circle_dirac_matrix(n_modes);
  std::vector<Eigen::Index> plus, minus;
  for (int k = 0; k < n_fourier; ++k) (-(k - n_modes) > 0 ? plus : minus).push_back(k);
  s.basis_plus = f(Eigen::all, plus);
  s.basis_minus = f(Eigen::all, minus);
  s.t_plus = s.basis_plus.adjoint() * s.q_matrix * s.basis_plus;
  s.t_minus = s.basis_minus.adjoint() * s.q_matrix * s.basis_minus;
  s.t_plus = (0.5 * (s.t_plus + s.t_plus.adjoint())).eval();
  s.t_minus = (0.5 * (s.t_minus + s.t_minus.adjoint())).eval();
  finish_split(s);
  return s;
}

SectorSplit sector_split_custom(const CMatrix& q_matrix, const CMatrix& p_plus) {
  const Eigen::Index n = q_matrix.rows();
  if (q_matrix.cols() != n || p_plus.rows() != n || p_plus.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "q_matrix and p_plus must be square of equal size");
  check_hermitian(q_matrix, "q_matrix");
  check_hermitian(p_plus, "p_plus");
  if ((p_plus * p_plus - p_plus).norm() > 1e-10) throw Error(ErrorCode::InvalidArgument, "p_plus is not a projector");
  const CMatrix p_minus = CMatrix::Identity(n, n) - p_plus;
  const double off = numeric::operator_norm(p_plus * q_matrix * p_minus);
  if (off > kAdditivityTol)
    throw Error(ErrorCode::NotAdditive, "||P+ Q P-|| = " + numeric::format_double(off));

  Eigen::SelfAdjointEigenSolver<CMatrix> es(p_plus);
  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index k = 0; k < n; ++k) (es.eigenvalues()(k) > 0.5 ? plus : minus).push_back(k);
  SectorSplit s;
  s.weights = RVector::Ones(n);
  s.q_matrix = q_matrix;
  s.basis_plus = es.eigenvectors()(Eigen::all, plus);
  s.basis_minus = es.eigenvectors()(Eigen::all, minus);
  s.t_plus = s.basis_plus.adjoint() * q_matrix * s.basis_plus;
  s.t_minus = s.basis_minus.adjoint() * q_matrix * s.basis_minus;
  s.t_plus = (0.5 * (s.t_plus + s.t_plus.adjoint())).eval();
  s.t_minus = (0.5 * (s.t_minus + s.t_minus.adjoint())).eval();
  finish_split(s);
  return s;
}

cplx form_value(const SectorSplit& split, const CVector& u, const CVector& v) {
  return u.dot(split.q_matrix * v);
}

ReconstructedOperator reconstruct_operator(const SectorSplit& split, int n_pairs, std::uint64_t seed) {
  ReconstructedOperator r;
  r.t = split.basis_plus * split.t_plus * split.basis_plus.adjoint() +
        split.basis_minus * split.t_minus * split.basis_minus.adjoint();
  r.hermiticity_defect = (r.t - r.t.adjoint()).norm();
  const double qn = std::max(1.0, numeric::operator_norm(split.q_matrix));
  const Eigen::Index n = r.t.rows();
  std::mt19937_64 rng(seed);
  r.representation_defect = 0.0;
  for (int k = 0; k < n_pairs; ++k) {
    const CVector u = numeric::random_cvector(static_cast<int>(n), rng);
    const CVector v = numeric::random_cvector(static_cast<int>(n), rng);
    const cplx lhs = form_value(split, u, v);
    const cplx rhs = u.dot(split.weights.cast<cplx>().asDiagonal() * (r.t * v));
    r.representation_defect = std::max(r.representation_defect, std::abs(lhs - rhs) / (u.norm() * v.norm() * qn));
  }
  r.verified = r.hermiticity_defect <= 1e-10 && r.representation_defect <= 1e-10;
  return r;
}

double graph_norm_sq(const SectorSplit& split, const CVector& phi) {
  const CVector pp = split.p_plus * phi;
  const CVector pm = split.p_minus * phi;
  const auto wnorm2 = [&](const CVector& v) { return v.dot(split.weights.cast<cplx>().asDiagonal() * v).real(); };
  const double a = std::max(0.0, -split.lambda_min_plus);
  const double b = std::max(0.0, split.lambda_max_minus);
  return (1.0 + a) * wnorm2(pp) + form_value(split, pp, pp).real() + (1.0 + b) * wnorm2(pm) -
         form_value(split, pm, pm).real();
}

}  // namespace saext
