#include "saext/boundary_param.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace saext {

BoundaryUnitary BoundaryUnitary::from_matrix(const CMatrix& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "boundary unitary must be a non-empty square matrix");
  const Eigen::Index n = matrix.rows();
  const double defect = (matrix.adjoint() * matrix - CMatrix::Identity(n, n)).norm();
  if (!(defect <= kUnitaryTol))
    throw Error(ErrorCode::NonUnitary, "||U^H U - I|| = " + std::to_string(defect));

  BoundaryUnitary bu;
  bu.matrix_ = matrix;

  Eigen::ComplexSchur<CMatrix> schur(matrix);
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "Schur decomposition failed");
  const CMatrix& z = schur.matrixU();
  const CMatrix& t = schur.matrixT();

  std::vector<Eigen::Index> in_w, out_w;
  std::vector<double> out_angles;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double theta = std::arg(t(k, k));
    bu.angles_.push_back(theta);
    if (kPi - std::abs(theta) <= kMinusOneClusterTol) {
      in_w.push_back(k);
    } else {
      out_w.push_back(k);
      out_angles.push_back(theta);
    }
  }
  std::sort(bu.angles_.begin(), bu.angles_.end());

  bu.w_basis_.resize(n, static_cast<Eigen::Index>(in_w.size()));
  for (std::size_t j = 0; j < in_w.size(); ++j) bu.w_basis_.col(j) = z.col(in_w[j]);

  CMatrix a_full = CMatrix::Zero(n, n);
  double max_angle = 0.0;
  for (std::size_t j = 0; j < out_w.size(); ++j) {
    const CVector zk = z.col(out_w[j]);
    a_full -= std::tan(0.5 * out_angles[j]) * (zk * zk.adjoint());
    max_angle = std::max(max_angle, std::abs(out_angles[j]));
  }
  a_full = (0.5 * (a_full + a_full.adjoint())).eval();

  if (in_w.empty()) {
    bu.complement_basis_ = CMatrix::Identity(n, n);
    bu.cayley_ = a_full;
  } else {
    bu.complement_basis_.resize(n, static_cast<Eigen::Index>(out_w.size()));
    for (std::size_t j = 0; j < out_w.size(); ++j) bu.complement_basis_.col(j) = z.col(out_w[j]);
    bu.cayley_ = bu.complement_basis_.adjoint() * a_full * bu.complement_basis_;
    bu.cayley_ = (0.5 * (bu.cayley_ + bu.cayley_.adjoint())).eval();
  }

  bu.gap_delta_ = out_w.empty() ? kPi : kPi - max_angle;
  bu.no_gap_ = !out_w.empty() && bu.gap_delta_ < kNoGapThreshold;
  return bu;
}

CMatrix BoundaryUnitary::cayley_full() const {
  return complement_basis_ * cayley_ * complement_basis_.adjoint();
}

CMatrix BoundaryUnitary::w_projector() const { return w_basis_ * w_basis_.adjoint(); }

CMatrix inverse_cayley(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  // The two factors commute, so the left solve gives the same matrix.
  return (id + kI * a).partialPivLu().solve(id - kI * a);
}

namespace {

struct NamedBuilder {
  int n;
  CMatrix operator()(const Dirichlet&) const { return -CMatrix::Identity(n, n); }
  CMatrix operator()(const Neumann&) const { return CMatrix::Identity(n, n); }
  CMatrix operator()(const Robin& r) const {
    if (!std::isfinite(r.c)) throw Error(ErrorCode::InvalidArgument, "Robin parameter must be finite");
    const double alpha = -2.0 * std::atan(r.c);
    return std::polar(1.0, alpha) * CMatrix::Identity(n, n);
  }
  CMatrix operator()(const QuasiPeriodic& q) const {
    if (n != 2) throw Error(ErrorCode::InvalidArgument, "quasi-periodic condition couples exactly two endpoints");
    if (!std::isfinite(q.tau)) throw Error(ErrorCode::InvalidArgument, "quasi-periodic phase must be finite");
    CMatrix u = CMatrix::Zero(2, 2);
    u(0, 1) = std::polar(1.0, -q.tau);
    u(1, 0) = std::polar(1.0, q.tau);
    return u;
  }
};

}  // namespace

BoundaryUnitary named_condition(const NamedCondition& kind, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "boundary dimension must be >= 1");
  return BoundaryUnitary::from_matrix(std::visit(NamedBuilder{n}, kind));
}

ConditionCheck check_boundary_condition(const BoundaryUnitary& bu, const BoundaryData& bd, double tol) {
  if (bd.trace.size() != bu.dim() || bd.normal_trace.size() != bu.dim())
    throw Error(ErrorCode::DimensionMismatch, "boundary data dimension does not match the unitary");
  const double w_part = (bu.w_basis().adjoint() * bd.trace).norm();
  const CVector phi_perp = bu.complement_basis().adjoint() * bd.trace;
  const CVector dphi_perp = bu.complement_basis().adjoint() * bd.normal_trace;
  const double robin_part = (dphi_perp - bu.cayley() * phi_perp).norm();
  const double residual = std::max(w_part, robin_part);
  return {w_part <= tol && robin_part <= tol, residual};
}

}  // namespace saext
