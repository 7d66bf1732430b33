#include <doctest.h>

#include "oracles.hpp"
#include "saext/dirac1d.hpp"
#include "saext/numeric.hpp"

#include <cmath>

using namespace saext;

namespace {

struct Field {
  // xi(x) = boundary interpolation + bump terms vanishing at both ends
  Eigen::Vector2cd left, right, bump1, bump2;
  double L;
  Eigen::Vector2cd value(double x) const {
    const double t = x / L;
    return (1 - t) * left + t * right + std::sin(kPi * t) * bump1 + std::sin(2 * kPi * t) * bump2;
  }
  Eigen::Vector2cd derivative(double x) const {
    const double t = x / L;
    return (right - left) / L + kPi / L * std::cos(kPi * t) * bump1 + 2 * kPi / L * std::cos(2 * kPi * t) * bump2;
  }
  CVector boundary() const {
    CVector b(4);
    b << left(0), left(1), right(0), right(1);
    return b;
  }
};

Eigen::Matrix2cd sigma1() {
  Eigen::Matrix2cd s;
  s << 0, 1, 1, 0;
  return s;
}

Field random_field(double L, const CVector& boundary, std::mt19937_64& rng) {
  Field f;
  f.L = L;
  f.left = boundary.head<2>();
  f.right = boundary.tail<2>();
  f.bump1 = numeric::random_cvector(2, rng);
  f.bump2 = numeric::random_cvector(2, rng);
  return f;
}

// <D xi, zeta> - <xi, D zeta> by composite Gauss quadrature, D = i sigma1 d/dx.
cplx green_defect(const Field& xi, const Field& zeta) {
  std::vector<double> x, w;
  oracle::gauss3(0.0, xi.L, 400, x, w);
  cplx s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Eigen::Vector2cd dxi = kI * sigma1() * xi.derivative(x[k]);
    const Eigen::Vector2cd dze = kI * sigma1() * zeta.derivative(x[k]);
    s += w[k] * (dxi.dot(zeta.value(x[k])) - xi.value(x[k]).dot(dze));
  }
  return s;
}

double field_norm(const Field& f) {
  std::vector<double> x, w;
  oracle::gauss3(0.0, f.L, 400, x, w);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * f.value(x[k]).squaredNorm();
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("circle spectrum is the integer lattice") {
  const auto r = circle_dirac_spectrum(2);
  REQUIRE(r.eigenvalues.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(r.eigenvalues[k] - (k - 2)) < 1e-12);
  const auto z = circle_dirac_spectrum(0);
  REQUIRE(z.eigenvalues.size() == 1);
  CHECK(z.eigenvalues[0] == 0.0);
  const auto big = circle_dirac_spectrum(40);
  for (int k = 0; k < 81; ++k) CHECK(std::abs(big.eigenvalues[k] - (k - 40)) < 1e-12);
  for (double res : big.residuals) CHECK(res < 1e-10);
}

TEST_CASE("circle matrix equals i times the spectral derivative; its square has spectrum n^2") {
  for (int n_modes : {1, 3, 8}) {
    const int n = 2 * n_modes + 1;
    const CMatrix d = circle_dirac_matrix(n_modes);
    const CMatrix ref = kI * oracle::spectral_derivative(n).cast<cplx>();
    CHECK((d - ref).norm() < 1e-12 * n);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(d * d);
    std::vector<double> sq;
    for (int k = -n_modes; k <= n_modes; ++k) sq.push_back(1.0 * k * k);
    std::sort(sq.begin(), sq.end());
    for (int k = 0; k < n; ++k) CHECK(std::abs(es.eigenvalues()(k) - sq[k]) < 1e-10);
  }
}

TEST_CASE("boundary form antisymmetry") {
  std::mt19937_64 rng(8);
  const auto setup = DiracBoundarySetup::interval(numeric::random_unitary(2, rng));
  for (int rep = 0; rep < 20; ++rep) {
    const CVector phi = numeric::random_cvector(4, rng), psi = numeric::random_cvector(4, rng);
    CHECK(std::abs(boundary_form(setup, phi, psi) + std::conj(boundary_form(setup, psi, phi))) <= 1e-14);
  }
  // J^2 = -1 and H+- are its +-i eigenspaces
  CHECK((setup.j_matrix * setup.j_matrix + CMatrix::Identity(4, 4)).norm() < 1e-15);
  CHECK((setup.j_matrix * setup.h_plus_basis - kI * setup.h_plus_basis).norm() < 1e-15);
  CHECK((setup.j_matrix * setup.h_minus_basis + kI * setup.h_minus_basis).norm() < 1e-15);
}

TEST_CASE("Green's formula: boundary form equals the bulk defect; it vanishes on the domain") {
  std::mt19937_64 rng(17);
  const double L = 1.3;
  for (int rep = 0; rep < 5; ++rep) {
    const auto setup = DiracBoundarySetup::interval(numeric::random_unitary(2, rng));
    // arbitrary fields: defect matches -i [xi^H sigma1 zeta]_0^L = boundary_form
    const Field a = random_field(L, numeric::random_cvector(4, rng), rng);
    const Field b = random_field(L, numeric::random_cvector(4, rng), rng);
    CHECK(std::abs(green_defect(a, b) - boundary_form(setup, a.boundary(), b.boundary())) < 1e-10);
    // fields in the U-domain
    const Field p = random_field(L, project_to_domain(setup, numeric::random_cvector(4, rng)), rng);
    const Field q = random_field(L, project_to_domain(setup, numeric::random_cvector(4, rng)), rng);
    CHECK(boundary_condition_defect(setup, p.boundary()) < 1e-14);
    CHECK(std::abs(green_defect(p, q)) <= 1e-8 * field_norm(p) * field_norm(q));
    CHECK(std::abs(green_defect(a, b)) > 1e-3);
  }
}

TEST_CASE("decoupled phases give a shifted lattice") {
  const double t0 = 0.4, tl = -1.1, L = 2.0;
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 0) = std::exp(kI * t0);
  u(1, 1) = std::exp(kI * tl);
  const auto setup = DiracBoundarySetup::interval(u);
  const auto r = interval_dirac_spectrum(L, setup, 0, {-6.0, 6.0});
  // e^{2iEL} = e^{i(t0 + tl)}
  std::vector<double> ref;
  for (int k = -10; k <= 10; ++k) {
    const double e = ((t0 + tl) / 2 + k * kPi) / L;
    if (e > -6 && e < 6) ref.push_back(e);
  }
  REQUIRE(r.eigenvalues.size() == ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(r.eigenvalues[k] - ref[k]) < 1e-12);

  const auto fd = oracle::StaggeredDirac(L, oracle::cayley2(u), 4000).eigenvalues_in(-6.0, 6.0);
  CHECK(fd.size() == ref.size());
  for (double e : ref) {
    double best = 1e300;
    for (double f : fd) best = std::min(best, std::abs(f - e));
    CHECK(best < 1e-4);
  }
}

TEST_CASE("interval spectra match the staggered finite-difference oracle") {
  std::mt19937_64 rng(2024);
  const double L = 1.0;
  for (int rep = 0; rep < 3; ++rep) {
    const CMatrix u = numeric::random_unitary(2, rng);
    const auto setup = DiracBoundarySetup::interval(u);
    const auto r = interval_dirac_spectrum(L, setup, 0, {-8.0, 8.0});
    REQUIRE(r.eigenvalues.size() >= 4);
    for (double d : r.residuals) CHECK(d < 1e-9);
    const auto fd = oracle::StaggeredDirac(L, oracle::cayley2(u), 4000).eigenvalues_in(-8.0, 8.0);
    REQUIRE(fd.size() == r.eigenvalues.size());
    for (std::size_t k = 0; k < fd.size(); ++k)
      CHECK(std::abs(fd[k] - r.eigenvalues[k]) < 1e-4 * std::max(1.0, std::abs(fd[k])));
  }
}

TEST_CASE("FD oracle: inertia counting agrees with the dense eigensolver") {
  std::mt19937_64 rng(4);
  const CMatrix u = numeric::random_unitary(2, rng);
  const auto dense = oracle::staggered_dirac_eigenvalues(1.0, oracle::cayley2(u), 150);
  REQUIRE(dense.size() == 301);
  const oracle::StaggeredDirac band(1.0, oracle::cayley2(u), 150);
  const auto counted = band.eigenvalues_in(-30.0, 30.0);
  std::vector<double> inside;
  for (double e : dense)
    if (e > -30.0 && e < 30.0) inside.push_back(e);
  REQUIRE(counted.size() == inside.size());
  for (std::size_t k = 0; k < inside.size(); ++k) CHECK(std::abs(counted[k] - inside[k]) < 1e-9);
}

TEST_CASE("secular function vanishes with the determinant and eigenvectors solve the boundary system") {
  std::mt19937_64 rng(5);
  const auto setup = DiracBoundarySetup::interval(numeric::random_unitary(2, rng));
  const double L = 1.5;
  const auto r = interval_dirac_spectrum(L, setup, 3, {-10.0, 10.0});
  REQUIRE(r.eigenvalues.size() == 3);
  for (int k = 0; k < 3; ++k) {
    const double e = r.eigenvalues[k];
    CHECK(std::abs(secular_function(setup, L, e)) < 1e-10);
    CHECK(std::abs(secular_determinant(setup, L, e)) < 1e-9);
    // rebuild boundary data from (a0, b0) and test the condition
    const cplx a0 = r.eigenvectors(0, k), b0 = r.eigenvectors(1, k);
    const double s = 1 / std::sqrt(2.0);
    const Eigen::Vector2cd ep(s, s), em(s, -s);
    CVector bd(4);
    bd.head<2>() = a0 * ep + b0 * em;
    bd.tail<2>() = a0 * std::exp(-kI * e * L) * ep + b0 * std::exp(kI * e * L) * em;
    CHECK(boundary_condition_defect(setup, bd) < 1e-9 * bd.norm());
    // D xi = E xi for the plane waves: i sigma1 (-iE e+) = E e+, i sigma1 (iE e-) = E e-
    CHECK(((kI * sigma1() * (-kI * e * ep)) - e * ep).norm() < 1e-14 * std::max(1.0, std::abs(e)));
  }
  // the n_eigs selection keeps the smallest |E|
  const auto all = interval_dirac_spectrum(L, setup, 0, {-10.0, 10.0});
  std::vector<double> mags;
  for (double e : all.eigenvalues) mags.push_back(std::abs(e));
  std::sort(mags.begin(), mags.end());
  for (double e : r.eigenvalues) CHECK(std::abs(e) <= mags[2] + 1e-12);
}

TEST_CASE("Dirac setup preconditions") {
  CHECK_THROWS_AS((void)DiracBoundarySetup::interval(CMatrix::Identity(3, 3)), Error);
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS((void)DiracBoundarySetup::interval(bad), Error);
  const auto setup = DiracBoundarySetup::interval(CMatrix::Identity(2, 2));
  CHECK_THROWS_AS((void)interval_dirac_spectrum(-1.0, setup, 0, {-1.0, 1.0}), Error);
  CHECK_THROWS_AS((void)interval_dirac_spectrum(1.0, setup, 0, {1.0, -1.0}), Error);
}

TEST_CASE("position split") {
  const auto s = sector_split_position({-1.0, -0.5, 0.5, 1.0});
  CMatrix pp = CMatrix::Zero(4, 4);
  pp(2, 2) = pp(3, 3) = 1.0;
  CHECK((s.p_plus - pp).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> em(s.t_minus), ep(s.t_plus);
  CHECK(em.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(em.eigenvalues()(1) == doctest::Approx(-0.5));
  CHECK(ep.eigenvalues()(0) == doctest::Approx(0.5));
  CHECK(ep.eigenvalues()(1) == doctest::Approx(1.0));
  CHECK(s.lambda_min_plus > 0);
  CHECK(s.lambda_max_minus < 0);
  const auto rec = reconstruct_operator(s);
  CMatrix x = CMatrix::Zero(4, 4);
  x(0, 0) = -1.0;
  x(1, 1) = -0.5;
  x(2, 2) = 0.5;
  x(3, 3) = 1.0;
  CHECK((rec.t - x).norm() == 0.0);
  CHECK(rec.verified);
}

TEST_CASE("momentum split") {
  const auto s = sector_split_momentum(5);
  Eigen::SelfAdjointEigenSolver<CMatrix> ep(s.t_plus), em(s.t_minus);
  REQUIRE(ep.eigenvalues().size() == 2);
  REQUIRE(em.eigenvalues().size() == 3);
  CHECK(ep.eigenvalues()(0) == doctest::Approx(1.0));
  CHECK(ep.eigenvalues()(1) == doctest::Approx(2.0));
  CHECK(em.eigenvalues()(0) == doctest::Approx(-2.0));
  CHECK(em.eigenvalues()(1) == doctest::Approx(-1.0));
  CHECK(std::abs(em.eigenvalues()(2)) < 1e-13);
  for (int n : {5, 11, 31}) {
    const auto sp = sector_split_momentum(n);
    const auto rec = reconstruct_operator(sp);
    const CMatrix direct = kI * oracle::spectral_derivative(n).cast<cplx>();
    CHECK((rec.t - direct).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK_THROWS_AS((void)sector_split_momentum(4), Error);
}

TEST_CASE("property: partial orthogonal additivity") {
  std::mt19937_64 rng(31);
  std::vector<double> grid;
  for (int k = -20; k <= 20; ++k)
    if (k != 0) grid.push_back(0.1 * k);
  for (const auto& s : {sector_split_position(grid), sector_split_momentum(41)}) {
    const int n = static_cast<int>(s.q_matrix.rows());
    for (int rep = 0; rep < 100; ++rep) {
      const CVector a = s.p_plus * numeric::random_cvector(n, rng);
      const CVector b = s.p_minus * numeric::random_cvector(n, rng);
      const cplx lhs = form_value(s, a + b, a + b);
      const cplx rhs = form_value(s, a, a) + form_value(s, b, b);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, (a + b).squaredNorm()));
    }
  }
}

TEST_CASE("property: graph norm is positive") {
  std::mt19937_64 rng(12);
  const auto s = sector_split_momentum(21);
  for (int rep = 0; rep < 50; ++rep) {
    const CVector phi = numeric::random_cvector(21, rng);
    CHECK(graph_norm_sq(s, phi) > 0.0);
    CHECK(graph_norm_sq(s, phi) >= phi.squaredNorm() - 1e-10);
  }
}

TEST_CASE("custom split") {
  CMatrix q = CMatrix::Zero(3, 3);
  q(0, 0) = 2.0;
  q(1, 1) = -1.0;
  q(2, 2) = 0.5;
  CMatrix p = CMatrix::Zero(3, 3);
  p(0, 0) = 1.0;
  const auto s = sector_split_custom(q, p);
  CHECK(s.lambda_min_plus == doctest::Approx(2.0));
  CHECK(s.lambda_max_minus == doctest::Approx(0.5));
  CHECK(reconstruct_operator(s).verified);

  q(0, 1) = q(1, 0) = 0.3;
  try {
    (void)sector_split_custom(q, p);
    FAIL("expected NotAdditive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAdditive);
  }
  CMatrix notproj = p * 2.0;
  q(0, 1) = q(1, 0) = 0.0;
  CHECK_THROWS_AS((void)sector_split_custom(q, notproj), Error);
}
