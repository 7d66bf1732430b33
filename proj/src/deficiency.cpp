#include "saext/deficiency.hpp"

#include "saext/boundary_param.hpp"
#include "saext/numeric.hpp"

#include <cmath>

namespace saext {

namespace {

RVector uniform_grid(double length, int n_intervals) {
  return RVector::LinSpaced(n_intervals + 1, 0.0, length);
}

double spacing(const RVector& grid) { return grid(1) - grid(0); }

RVector weights(const DeficiencyPair& pair) {
  return numeric::simpson_weights(static_cast<int>(pair.grid.size()) - 1, spacing(pair.grid));
}

void make_positive_at_origin(CVector& v) {
  const double mag = std::abs(v(0));
  if (mag > 0) v *= std::conj(v(0)) / mag;
}

// Normalized L2 solutions of u'' = z u on the grid of `pair` (single component).
std::vector<CVector> solutions(const DeficiencyPair& pair, cplx z) {
  const cplx k = std::sqrt(z);  // principal branch, Re k > 0 since Im z != 0
  const RVector& x = pair.grid;
  const Eigen::Index n = x.size();
  const double extent = x(n - 1);
  std::vector<CVector> out;
  DeficiencyPair scalar = pair;
  scalar.components = 1;

  if (pair.kind == DomainKind::HalfLine) {
    if (std::exp(-k.real() * extent) >= kDecayFloor)
      throw Error(ErrorCode::GridTooShort, "decay exp(-Re(k) * extent) = " +
                                               numeric::format_double(std::exp(-k.real() * extent)) +
                                               " is not below 1e-8");
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::exp(-k * x(i));
    v /= l2_norm(scalar, v);
    out.push_back(v);
    return out;
  }

  CVector a(n), b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i) = std::exp(-k * x(i));
    b(i) = std::exp(k * (x(i) - extent));
  }
  a /= l2_norm(scalar, a);
  for (int pass = 0; pass < 2; ++pass) b -= inner_product(scalar, a, b) * a;
  b /= l2_norm(scalar, b);
  make_positive_at_origin(a);
  make_positive_at_origin(b);
  out.push_back(a);
  out.push_back(b);
  return out;
}

DeficiencyPair one_body(DomainKind kind, double extent, int grid_n) {
  if (grid_n < 100) throw Error(ErrorCode::InvalidArgument, "grid_n must be >= 100");
  if (!(std::isfinite(extent) && extent > 0))
    throw Error(ErrorCode::InvalidArgument, "grid extent must be positive and finite");
  DeficiencyPair pair;
  pair.kind = kind;
  pair.grid = uniform_grid(extent, grid_n);
  pair.basis_plus = solutions(pair, -kI);
  pair.basis_minus = solutions(pair, kI);
  pair.n_plus = static_cast<int>(pair.basis_plus.size());
  pair.n_minus = static_cast<int>(pair.basis_minus.size());
  return pair;
}

}  // namespace

DeficiencyPair half_line_laplacian_deficiency(double grid_extent, int grid_n) {
  return one_body(DomainKind::HalfLine, grid_extent, grid_n);
}

DeficiencyPair interval_laplacian_deficiency(double length, int grid_n) {
  return one_body(DomainKind::Interval, length, grid_n);
}

DeficiencyPair bipartite_deficiency(const DeficiencyPair& def_a, const std::vector<double>& lambdas) {
  if (def_a.components != 1)
    throw Error(ErrorCode::InvalidArgument, "bipartite_deficiency expects a one-body deficiency pair");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!std::isfinite(lambdas[k])) throw Error(ErrorCode::InvalidArgument, "bulk eigenvalues must be finite");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "bulk eigenvalues must be sorted strictly descending");
  }

  DeficiencyPair out;
  out.kind = def_a.kind;
  out.grid = def_a.grid;
  out.components = static_cast<int>(lambdas.size());
  out.shifts = lambdas;
  const Eigen::Index n = def_a.grid.size();
  const Eigen::Index total = n * out.components;

  for (int slot = 0; slot < out.components; ++slot) {
    for (int sign : {+1, -1}) {
      const cplx z = lambdas[slot] - static_cast<double>(sign) * kI;
      for (const CVector& phi : solutions(def_a, z)) {
        CVector v = CVector::Zero(total);
        v.segment(slot * n, n) = phi;
        (sign > 0 ? out.basis_plus : out.basis_minus).push_back(v);
      }
    }
  }
  out.n_plus = static_cast<int>(out.basis_plus.size());
  out.n_minus = static_cast<int>(out.basis_minus.size());
  return out;
}

cplx inner_product(const DeficiencyPair& pair, const CVector& u, const CVector& v) {
  const Eigen::Index n = pair.grid.size();
  if (u.size() != n * pair.components || v.size() != n * pair.components)
    throw Error(ErrorCode::DimensionMismatch, "sampled function has the wrong length");
  const RVector w = weights(pair);
  cplx s = 0.0;
  for (int a = 0; a < pair.components; ++a)
    for (Eigen::Index i = 0; i < n; ++i) s += w(i) * std::conj(u(a * n + i)) * v(a * n + i);
  return s;
}

double l2_norm(const DeficiencyPair& pair, const CVector& u) {
  return std::sqrt(std::max(0.0, inner_product(pair, u, u).real()));
}

CVector apply_operator(const DeficiencyPair& pair, const CVector& u) {
  const Eigen::Index n = pair.grid.size();
  if (u.size() != n * pair.components) throw Error(ErrorCode::DimensionMismatch, "sampled function has the wrong length");
  const double h = spacing(pair.grid);
  const double h2 = h * h;
  CVector out = CVector::Zero(u.size());
  for (int a = 0; a < pair.components; ++a) {
    const auto f = u.segment(a * n, n);
    auto g = out.segment(a * n, n);
    for (Eigen::Index i = 2; i + 2 < n; ++i)
      g(i) = -(-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) - f(i + 2)) / (12.0 * h2);
    for (Eigen::Index i : {Eigen::Index{1}, n - 2})
      g(i) = -(f(i - 1) - 2.0 * f(i) + f(i + 1)) / h2;
    for (Eigen::Index i = 1; i + 1 < n; ++i) g(i) += pair.shifts[a] * f(i);
  }
  return out;
}

double defining_residual(const DeficiencyPair& pair, const CVector& xi, int sign) {
  const Eigen::Index n = pair.grid.size();
  const CVector t = apply_operator(pair, xi);
  const double h = spacing(pair.grid);
  double num = 0.0;
  for (int a = 0; a < pair.components; ++a)
    for (Eigen::Index i = 2; i + 2 < n; ++i)
      num += h * std::norm(t(a * n + i) - static_cast<double>(sign) * kI * xi(a * n + i));
  const double den = l2_norm(pair, xi);
  return den > 0 ? std::sqrt(num) / den : 0.0;
}

VonNeumannExtension VonNeumannExtension::make(const DeficiencyPair& base, const CMatrix& k) {
  if (base.n_plus != base.n_minus)
    throw Error(ErrorCode::DimensionMismatch, "von Neumann extensions need n+ = n-");
  if (k.rows() != base.n_plus || k.cols() != base.n_plus)
    throw Error(ErrorCode::DimensionMismatch, "K must be n+ x n+");
  if (k.size() > 0) {
    const double defect = (k.adjoint() * k - CMatrix::Identity(k.rows(), k.cols())).norm();
    if (!(defect <= kUnitaryTol)) throw Error(ErrorCode::NonUnitary, "||K^H K - I|| = " + numeric::format_double(defect));
  }
  return {k, base};
}

ExtensionAction apply_von_neumann_extension(const VonNeumannExtension& ext, const CVector& phi0,
                                            const CVector& xi_plus) {
  const DeficiencyPair& base = ext.base;
  const Eigen::Index n = base.grid.size();
  if (phi0.size() != n * base.components) throw Error(ErrorCode::DimensionMismatch, "phi0 has the wrong length");
  if (xi_plus.size() != base.n_plus) throw Error(ErrorCode::DimensionMismatch, "xi_plus must have n+ coefficients");
  for (int a = 0; a < base.components; ++a)
    for (Eigen::Index i : {Eigen::Index{0}, Eigen::Index{1}, n - 2, n - 1})
      if (phi0(a * n + i) != cplx(0.0))
        throw Error(ErrorCode::InvalidArgument, "phi0 must vanish on the first and last two grid nodes");

  const CVector k_xi = ext.k_matrix * xi_plus;
  CVector plus = CVector::Zero(phi0.size());
  CVector minus = CVector::Zero(phi0.size());
  for (int j = 0; j < base.n_plus; ++j) {
    plus += xi_plus(j) * base.basis_plus[j];
    minus += k_xi(j) * base.basis_minus[j];
  }
  return {phi0 + plus + minus, apply_operator(base, phi0) + kI * (plus - minus)};
}

}  // namespace saext
