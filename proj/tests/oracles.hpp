#pragma once

// Reference computations used by the tests. Everything here is written from
// scratch against closed forms so that it shares no code path with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <tuple>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

inline double bisect(const std::function<double(double)>& f, double a, double b, int iters = 200) {
  double fa = f(a);
  for (int k = 0; k < iters && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// All sign-change roots of f on [a, b] found on a uniform scan.
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double a, double b, int cells) {
  std::vector<double> roots;
  double x0 = a, f0 = f(a);
  for (int i = 1; i <= cells; ++i) {
    const double x1 = a + (b - a) * i / cells;
    const double f1 = f(x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if ((f0 < 0) != (f1 < 0) && std::isfinite(f0) && std::isfinite(f1) && std::abs(f0 - f1) < 10.0)
      roots.push_back(bisect(f, x0, x1));
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

/// Power series of J_m; accurate to ~1e-12 for x below about 15.
inline double bessel_j(int m, double x) {
  double term = 1.0;
  for (int k = 1; k <= m; ++k) term *= 0.5 * x / k;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -0.25 * x * x / (k * (k + m));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

/// k-th positive zero (k = 1, 2, ...) of J_m.
inline double bessel_zero(int m, int k) {
  const auto roots = scan_roots([m](double x) { return bessel_j(m, x); }, 0.5, 20.0, 4000);
  return roots.at(static_cast<std::size_t>(k - 1));
}

/// Eigenvalues of -u'' on [0, L] with u'(0) = -c0 u(0)... expressed through outward
/// derivatives: u_n(0) := -u'(0) = c0 u(0), u_n(L) := u'(L) = cL u(L), with either
/// side optionally Dirichlet. Solutions below `emax` from the general solution.
struct RobinEnd {
  bool dirichlet = false;
  double c = 0.0;
};

inline std::vector<double> robin_interval_eigenvalues(double L, RobinEnd left, RobinEnd right, double emax) {
  // Shooting from x = 0 with the left condition, residual of the right one.
  // Positive energies: u = A cos(kx) + B sin(kx); negative: cosh/sinh.
  const auto residual = [&](double e) {
    double u0, du0;  // u(0), u'(0)
    if (left.dirichlet) {
      u0 = 0.0;
      du0 = 1.0;
    } else {
      u0 = 1.0;
      du0 = -left.c;  // -u'(0) = c u(0)
    }
    double uL, duL;
    if (e > 0) {
      const double k = std::sqrt(e);
      uL = u0 * std::cos(k * L) + du0 * std::sin(k * L) / k;
      duL = -u0 * k * std::sin(k * L) + du0 * std::cos(k * L);
    } else if (e < 0) {
      const double k = std::sqrt(-e);
      // scaled by e^{-kL} to keep values bounded
      const double ch = 0.5 * (1 + std::exp(-2 * k * L)), sh = 0.5 * (1 - std::exp(-2 * k * L));
      uL = u0 * ch + du0 * sh / k;
      duL = u0 * k * sh + du0 * ch;
    } else {
      uL = u0 + du0 * L;
      duL = du0;
    }
    return right.dirichlet ? uL : duL - right.c * uL;
  };
  std::vector<double> out;
  const double emin = -(std::abs(left.c) + std::abs(right.c) + 1.0) * (std::abs(left.c) + std::abs(right.c) + 1.0) - 1.0;
  // Negative energies: smooth scan; positive energies: scan in k to resolve oscillation.
  for (double r : scan_roots(residual, emin, -1e-12, 20000)) out.push_back(r);
  const double kmax = std::sqrt(emax);
  const auto rk = [&](double k) {
    const double v = residual(k * k);
    return v / std::max(1.0, k);
  };
  for (double k : scan_roots(rk, 1e-9, kmax, 200000)) out.push_back(k * k);
  return out;
}

/// Fourier spectral differentiation matrix on N (odd) equispaced points of the circle.
inline Eigen::MatrixXd spectral_derivative(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2 * pi / n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k) d(j, k) = 0.5 * (((j - k) % 2 == 0) ? 1.0 : -1.0) / std::sin((j - k) * h / 2);
  return d;
}

/// Staggered finite differences for i sigma1 d/dx on [0, L] with the boundary
/// condition written as (xi2(0), xi2(L)) = i S A (xi1(0), xi1(L)), S = diag(-1, 1),
/// A the Cayley transform of the boundary unitary. xi1 lives on the n + 1 nodes,
/// xi2 on the n cell midpoints; the boundary values of xi2 enter through linear
/// ghost extrapolation. With cell weights (h/2 at the two end nodes, h elsewhere)
/// the scheme is W M with W M Hermitian, so the spectrum is that of
/// W^{-1/2} (W M) W^{-1/2}. Returns all eigenvalues, ascending.
inline std::vector<double> staggered_dirac_eigenvalues(double L, const Eigen::Matrix2cd& a, int n) {
  const double h = L / n;
  const int dim = 2 * n + 1;
  const cplx I{0, 1};
  const auto x1 = [](int j) { return j; };
  const auto x2 = [n](int j) { return n + 1 + j; };  // midpoint j + 1/2
  const Eigen::Matrix2cd b = I * Eigen::Vector2cd(-1, 1).asDiagonal() * a;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  // E xi1_j = i (xi2_{j+1/2} - xi2_{j-1/2}) / h
  for (int j = 1; j < n; ++j) {
    m(x1(j), x2(j)) += I / h;
    m(x1(j), x2(j - 1)) -= I / h;
  }
  // j = 0: ghost xi2_{-1/2} = 2 b0 - xi2_{1/2}
  m(x1(0), x2(0)) += 2.0 * I / h;
  m(x1(0), x1(0)) -= 2.0 * I / h * b(0, 0);
  m(x1(0), x1(n)) -= 2.0 * I / h * b(0, 1);
  // j = n: ghost xi2_{n+1/2} = 2 bL - xi2_{n-1/2}
  m(x1(n), x1(0)) += 2.0 * I / h * b(1, 0);
  m(x1(n), x1(n)) += 2.0 * I / h * b(1, 1);
  m(x1(n), x2(n - 1)) -= 2.0 * I / h;
  // E xi2_{j+1/2} = i (xi1_{j+1} - xi1_j) / h
  for (int j = 0; j < n; ++j) {
    m(x2(j), x1(j + 1)) += I / h;
    m(x2(j), x1(j)) -= I / h;
  }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(dim, h);
  w(x1(0)) = w(x1(n)) = h / 2;
  const Eigen::VectorXd s = w.cwiseSqrt();
  Eigen::MatrixXcd hm = s.asDiagonal() * m * s.cwiseInverse().asDiagonal();
  if ((hm - hm.adjoint()).norm() > 1e-10 * hm.norm()) return {};
  hm = (0.5 * (hm + hm.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  return ev;
}

/// The same scheme, solved through Sylvester inertia instead of a dense
/// eigensolver. Along the chain xi1_0, xi2_{1/2}, xi1_1, ..., xi1_n the matrix
/// is tridiagonal plus the corner coupling of the two end nodes; the folded
/// ordering 0, N-1, 1, N-2, ... turns it into a band of half-width 2, whose
/// LDL^H factorization counts the eigenvalues below a shift.
class StaggeredDirac {
 public:
  StaggeredDirac(double L, const Eigen::Matrix2cd& a, int n) : dim_(2 * n + 1), band_(dim_, 3) {
    const double h = L / n;
    const cplx I{0, 1};
    const Eigen::Matrix2cd b = I * Eigen::Vector2cd(-1, 1).asDiagonal() * a;
    const auto weight = [&](int c) { return (c == 0 || c == dim_ - 1) ? h / 2 : h; };
    // chain entries M(c, c'), c = 2j for xi1_j and 2j + 1 for xi2_{j+1/2}
    std::vector<std::tuple<int, int, cplx>> m;
    for (int j = 1; j < n; ++j) {
      m.emplace_back(2 * j, 2 * j + 1, I / h);
      m.emplace_back(2 * j, 2 * j - 1, -I / h);
    }
    m.emplace_back(0, 1, 2.0 * I / h);
    m.emplace_back(0, 0, -2.0 * I / h * b(0, 0));
    m.emplace_back(0, 2 * n, -2.0 * I / h * b(0, 1));
    m.emplace_back(2 * n, 0, 2.0 * I / h * b(1, 0));
    m.emplace_back(2 * n, 2 * n, 2.0 * I / h * b(1, 1));
    m.emplace_back(2 * n, 2 * n - 1, -2.0 * I / h);
    for (int j = 0; j < n; ++j) {
      m.emplace_back(2 * j + 1, 2 * j + 2, I / h);
      m.emplace_back(2 * j + 1, 2 * j, -I / h);
    }
    pos_.resize(dim_);
    for (int k = 0, lo = 0, hi = dim_ - 1; lo <= hi; ++k) {
      pos_[lo++] = 2 * k;
      if (lo <= hi) pos_[hi--] = 2 * k + 1;
    }
    band_.setZero();
    for (const auto& [r, c, v] : m) {
      const cplx hv = std::sqrt(weight(r)) * v / std::sqrt(weight(c));
      const int pr = pos_[r], pc = pos_[c];
      if (pr >= pc) band_(pr, pr - pc) += hv;  // lower band; the upper half is its adjoint
    }
    for (int i = 0; i < dim_; ++i) band_(i, 0) = band_(i, 0).real();
  }

  int dim() const { return dim_; }

  /// Number of eigenvalues strictly below e.
  int count_below(double e) const {
    std::vector<double> d(dim_);
    std::vector<std::array<cplx, 3>> l(dim_);  // l[i][k] = L(i, i - k)
    int neg = 0;
    for (int i = 0; i < dim_; ++i) {
      for (int k = 2; k >= 1; --k) {
        const int j = i - k;
        if (j < 0) continue;
        cplx s = band_(i, k);
        for (int q = 1; q <= 2; ++q) {
          const int t = j - q;  // shared column t < j, needs i - t <= 2
          if (t < 0 || i - t > 2) continue;
          s -= l[i][i - t] * std::conj(l[j][q]) * d[t];
        }
        l[i][k] = s / d[j];
      }
      double di = band_(i, 0).real() - e;
      for (int k = 1; k <= 2; ++k)
        if (i - k >= 0) di -= std::norm(l[i][k]) * d[i - k];
      if (di == 0.0) di = 1e-300;
      d[i] = di;
      neg += di < 0;
    }
    return neg;
  }

  /// Eigenvalues in (lo, hi), each located by bisection on count_below.
  std::vector<double> eigenvalues_in(double lo, double hi, double tol = 1e-11) const {
    std::vector<double> out;
    const int c0 = count_below(lo), c1 = count_below(hi);
    for (int idx = c0; idx < c1; ++idx) {
      double a = lo, b = hi;
      while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        (count_below(mid) > idx ? b : a) = mid;
      }
      out.push_back(0.5 * (a + b));
    }
    return out;
  }

 private:
  int dim_;
  Eigen::MatrixXcd band_;
  std::vector<int> pos_;
};

/// i (U - I)(U + I)^-1 computed through the eigen-decomposition of U.
inline Eigen::Matrix2cd cayley2(const Eigen::Matrix2cd& u) {
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(u);
  Eigen::Matrix2cd v = es.eigenvectors();
  Eigen::Vector2cd d;
  for (int k = 0; k < 2; ++k) {
    const cplx z = es.eigenvalues()(k);
    d(k) = cplx{0, 1} * (z - 1.0) / (z + 1.0);
  }
  return v * d.asDiagonal() * v.inverse();
}

/// Composite 3-point Gauss-Legendre rule on [a, b].
inline void gauss3(double a, double b, int panels, std::vector<double>& x, std::vector<double>& w) {
  static const double g[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double h = (b - a) / panels;
  x.clear();
  w.clear();
  for (int p = 0; p < panels; ++p)
    for (int q = 0; q < 3; ++q) {
      x.push_back(a + h * (p + 0.5 + 0.5 * g[q]));
      w.push_back(0.5 * h * gw[q]);
    }
}

}  // namespace oracle
