#pragma once

// JSON forms of the library types. Complex numbers are [re, im] pairs;
// matrices are flat row-major lists of pairs.

#include "saext/bipartite.hpp"
#include "saext/boundary_param.hpp"
#include "saext/deficiency.hpp"
#include "saext/dirac1d.hpp"
#include "saext/symmetry_reduction.hpp"

#include <json.hpp>

namespace saext {

using Json = nlohmann::json;

Json complex_to_json(cplx z);
cplx complex_from_json(const Json& j);

/// Flat row-major [[re, im], ...].
Json matrix_to_json(const CMatrix& m);
/// Inverse of matrix_to_json for a square matrix (size inferred).
CMatrix square_matrix_from_json(const Json& j);
CMatrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols);

Json vector_to_json(const CVector& v);
Json real_vector_to_json(const RVector& v);

/// {"matrix": [...], "convention": "asorey"}.
Json to_json(const BoundaryUnitary& bu);
/// Strict: exactly the keys "matrix" and "convention", convention "asorey".
/// Throws InvalidArgument on malformed input, NonUnitary via from_matrix.
BoundaryUnitary boundary_unitary_from_json(const Json& j);

Json to_json(const DeficiencyPair& pair);
Json to_json(const BipartiteBoundState& st);
Json to_json(const DiracBoundarySetup& setup);
/// Reads "u_map" and rebuilds the setup; the stored bases must match the
/// canonical ones (InvalidArgument otherwise).
DiracBoundarySetup dirac_setup_from_json(const Json& j);
Json to_json(const SpectralResult& r);
Json to_json(const CornerReport& r);

}  // namespace saext
