#include "saext/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cmath>

namespace saext {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonUnitary: return "NonUnitary";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GridTooShort: return "GridTooShort";
    case ErrorCode::NoBoundState: return "NoBoundState";
    case ErrorCode::AlphaSingular: return "AlphaSingular";
    case ErrorCode::NoGap: return "NoGap";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::BracketTooCoarse: return "BracketTooCoarse";
    case ErrorCode::NotAdditive: return "NotAdditive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

namespace numeric {

RVector simpson_weights(int n_intervals, double h) {
  if (n_intervals < 1) throw Error(ErrorCode::InvalidArgument, "simpson_weights needs at least one interval");
  RVector w = RVector::Zero(n_intervals + 1);
  if (n_intervals == 1) {
    w(0) = w(1) = 0.5 * h;
    return w;
  }
  int simpson_cells = n_intervals;
  if (n_intervals % 2 == 1) simpson_cells = n_intervals - 3;
  for (int i = 0; i + 2 <= simpson_cells; i += 2) {
    w(i) += h / 3.0;
    w(i + 1) += 4.0 * h / 3.0;
    w(i + 2) += h / 3.0;
  }
  if (simpson_cells != n_intervals) {
    const int s = simpson_cells;
    w(s) += 3.0 * h / 8.0;
    w(s + 1) += 9.0 * h / 8.0;
    w(s + 2) += 9.0 * h / 8.0;
    w(s + 3) += 3.0 * h / 8.0;
  }
  return w;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "gauss_legendre needs n >= 1");
  RVector diag = RVector::Zero(n);
  RVector sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<RMatrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v0 * v0;
  }
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw Error(ErrorCode::InvalidArgument, "bisect: bracket has no sign change");
  for (int it = 0; it < 400 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CMatrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

CVector random_cvector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

double wrap_angle(double theta) {
  double t = std::remainder(theta, 2.0 * kPi);
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "fit_slope needs >= 2 paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double entropy(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p)
    if (x > 0.0) s -= x * std::log(x);
  return s;
}

}  // namespace numeric
}  // namespace saext
