#include "saext/serialization.hpp"

#include <cmath>
#include <set>

namespace saext {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

double finite_number(const Json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) bad(std::string(what) + " must be finite");
  return x;
}

}  // namespace

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) bad("complex numbers are [re, im] pairs");
  return {finite_number(j[0], "real part"), finite_number(j[1], "imaginary part")};
}

Json matrix_to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) out.push_back(complex_to_json(m(i, k)));
  return out;
}

CMatrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) bad("matrix must be a flat row-major list of [re, im] pairs");
  if (static_cast<Eigen::Index>(j.size()) != rows * cols)
    bad("matrix has " + std::to_string(j.size()) + " entries, expected " + std::to_string(rows * cols));
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[static_cast<std::size_t>(i * cols + k)]);
  return m;
}

CMatrix square_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("matrix must be a non-empty flat row-major list of [re, im] pairs");
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
  if (n * n != static_cast<Eigen::Index>(j.size())) bad("matrix entry count is not a perfect square");
  return matrix_from_json(j, n, n);
}

Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Json real_vector_to_json(const RVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const BoundaryUnitary& bu) {
  return Json{{"matrix", matrix_to_json(bu.matrix())}, {"convention", "asorey"}};
}

BoundaryUnitary boundary_unitary_from_json(const Json& j) {
  if (!j.is_object()) bad("boundary unitary must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "matrix" && key != "convention") bad("unknown boundary unitary field '" + key + "'");
  if (!j.contains("convention")) bad("boundary unitary needs a \"convention\" tag");
  if (j["convention"] != "asorey") bad("only the \"asorey\" convention is accepted");
  if (!j.contains("matrix")) bad("boundary unitary needs a \"matrix\"");
  return BoundaryUnitary::from_matrix(square_matrix_from_json(j["matrix"]));
}

Json to_json(const DeficiencyPair& pair) {
  Json plus = Json::array(), minus = Json::array();
  for (const auto& v : pair.basis_plus) plus.push_back(vector_to_json(v));
  for (const auto& v : pair.basis_minus) minus.push_back(vector_to_json(v));
  return Json{{"n_plus", pair.n_plus},
              {"n_minus", pair.n_minus},
              {"kind", pair.kind == DomainKind::HalfLine ? "half_line" : "interval"},
              {"components", pair.components},
              {"shifts", pair.shifts},
              {"grid", real_vector_to_json(pair.grid)},
              {"basis_plus", plus},
              {"basis_minus", minus}};
}

Json to_json(const BipartiteBoundState& st) {
  return Json{{"energy", st.energy},
              {"energy_from_alpha2", st.energy_from_alpha2},
              {"alpha1", st.alpha1},
              {"alpha2", st.alpha2},
              {"kappa1", st.kappa1},
              {"kappa2", st.kappa2},
              {"amplitudes", {st.amplitudes[0], st.amplitudes[1]}},
              {"schmidt", {st.schmidt[0], st.schmidt[1]}},
              {"entropy", st.entropy}};
}

Json to_json(const DiracBoundarySetup& setup) {
  return Json{{"j_matrix", matrix_to_json(setup.j_matrix)},
              {"h_plus_basis", matrix_to_json(setup.h_plus_basis)},
              {"h_minus_basis", matrix_to_json(setup.h_minus_basis)},
              {"u_map", matrix_to_json(setup.u_map)}};
}

DiracBoundarySetup dirac_setup_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("u_map")) bad("Dirac setup needs \"u_map\"");
  static const std::set<std::string> allowed{"j_matrix", "h_plus_basis", "h_minus_basis", "u_map"};
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) bad("unknown Dirac setup field '" + key + "'");
  DiracBoundarySetup s = DiracBoundarySetup::interval(matrix_from_json(j["u_map"], 2, 2));
  const auto same = [&](const char* key, const CMatrix& ref) {
    if (!j.contains(key)) return;
    const CMatrix m = matrix_from_json(j[key], ref.rows(), ref.cols());
    if ((m - ref).norm() > 1e-12) bad(std::string(key) + " differs from the canonical interval setup");
  };
  same("j_matrix", s.j_matrix);
  same("h_plus_basis", s.h_plus_basis);
  same("h_minus_basis", s.h_minus_basis);
  return s;
}

Json to_json(const SpectralResult& r) {
  return Json{{"eigenvalues", r.eigenvalues}, {"residuals", r.residuals}, {"mesh_n", r.mesh_n}};
}

Json to_json(const CornerReport& r) {
  Json out{{"theta_opening", r.theta_opening},
           {"exponent", r.exponent},
           {"harmonic_residual", r.harmonic_residual},
           {"edge_trace_max", r.edge_trace_max},
           {"epsilons", r.epsilons},
           {"integrals", r.integrals},
           {"slope", r.slope},
           {"h2_class", r.h2_class == H2Class::Finite ? "finite" : "divergent"}};
  if (r.h2_class == H2Class::Finite)
    out["h2_value"] = r.h2_value;
  else
    out["divergence_rate"] = r.divergence_rate;
  return out;
}

}  // namespace saext
