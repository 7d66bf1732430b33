#include <doctest.h>

#include "oracles.hpp"
#include "saext/numeric.hpp"
#include "saext/quadform1d.hpp"

#include <cmath>

using namespace saext;

namespace {

BoundaryUnitary diag_unitary(cplx a, cplx b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return BoundaryUnitary::from_matrix(m);
}

double rel(double got, double ref) { return std::abs(got - ref) / std::max(std::abs(ref), 1e-300); }

}  // namespace

TEST_CASE("assembly of the named conditions") {
  const auto neu = assemble(1.0, 10, named_condition(Neumann{}, 2));
  CHECK(neu.boundary_correction.norm() == 0.0);
  CHECK((neu.constraint - CMatrix::Identity(11, 11)).norm() < 1e-14);

  const auto dir = assemble(1.0, 10, named_condition(Dirichlet{}, 2));
  CHECK(dir.boundary_correction.norm() == 0.0);
  CHECK(dir.constraint.col(0).norm() < 1e-14);
  CHECK(dir.constraint.col(10).norm() < 1e-14);
  CHECK(dir.constrained_basis.cols() == 9);

  const double c = 0.7;
  const auto rob = assemble(1.0, 10, named_condition(Robin{c}, 2));
  CMatrix expect = CMatrix::Zero(11, 11);
  expect(0, 0) = -c;
  expect(10, 10) = -c;
  CHECK((rob.boundary_correction - expect).norm() < 1e-14);
  // stiffness and mass of P1 elements
  const double h = 0.1;
  CHECK(neu.stiffness(3, 3) == doctest::Approx(2 / h));
  CHECK(neu.stiffness(3, 4) == doctest::Approx(-1 / h));
  CHECK(neu.mass(3, 3) == doctest::Approx(4 * h / 6));
  CHECK(neu.mass(0, 0) == doctest::Approx(2 * h / 6));
  CHECK(neu.mass(3, 4) == doctest::Approx(h / 6));
}

TEST_CASE("Dirichlet and Neumann spectra on [0, pi]") {
  const auto d = solve(assemble(kPi, 400, named_condition(Dirichlet{}, 2)), 3);
  for (int k = 0; k < 3; ++k) CHECK(rel(d.eigenvalues[k], (k + 1.0) * (k + 1.0)) < 1e-3);
  const auto n = solve(assemble(kPi, 400, named_condition(Neumann{}, 2)), 3);
  CHECK(std::abs(n.eigenvalues[0]) < 1e-10);
  for (int k = 1; k < 3; ++k) CHECK(rel(n.eigenvalues[k], 1.0 * k * k) < 1e-3);
  for (double r : d.residuals) CHECK(r < 1e-8);
  // Dirichlet eigenvectors vanish at the ends
  CHECK(d.eigenvectors.row(0).norm() == 0.0);
  CHECK(d.eigenvectors.row(400).norm() == 0.0);
}

TEST_CASE("second-order convergence") {
  for (bool dirichlet : {true, false}) {
    std::vector<double> lh, le;
    for (int n : {100, 200, 400, 800}) {
      const auto bu = dirichlet ? named_condition(Dirichlet{}, 2) : named_condition(Neumann{}, 2);
      const auto r = solve(assemble(kPi, n, bu), 4);
      double err = 0.0;
      for (int k = 1; k <= 3; ++k) {
        const double ref = dirichlet ? (k + 0.0) * k : (k + 0.0) * k;
        err = std::max(err, std::abs(r.eigenvalues[dirichlet ? k - 1 : k] - ref));
      }
      lh.push_back(std::log(kPi / n));
      le.push_back(std::log(err));
    }
    CHECK(numeric::fit_slope(lh, le) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("Robin at x = 0, Dirichlet at pi: transcendental oracle") {
  // phidot(0) = phi(0) is A = 1 at x = 0, i.e. U = e^{-i pi/2} there.
  const auto bu = diag_unitary(cplx(0, -1), -1.0);
  const auto r = solve(assemble(kPi, 800, bu), 4);
  const auto ref = oracle::robin_interval_eigenvalues(kPi, {false, 1.0}, {true, 0.0}, 20.0);
  REQUIRE(ref.size() >= 4);
  CHECK(ref[0] < 0);  // tanh(kappa pi) = kappa has a root
  for (int k = 0; k < 4; ++k) CHECK(rel(r.eigenvalues[k], ref[k]) < 1e-4);
}

TEST_CASE("general Robin pair against the oracle") {
  const auto bu = diag_unitary(std::exp(kI * (-2 * std::atan(-0.6))), std::exp(kI * (-2 * std::atan(2.0))));
  const auto r = solve(assemble(1.7, 800, bu), 5);
  const auto ref = oracle::robin_interval_eigenvalues(1.7, {false, -0.6}, {false, 2.0}, 200.0);
  REQUIRE(ref.size() >= 5);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(r.eigenvalues[k] - ref[k]) < 1e-4 * std::max(1.0, std::abs(ref[k])));
}

TEST_CASE("periodic ring: doubly degenerate (2 pi k / L)^2") {
  const double L = 2.0;
  const auto r = solve(assemble(L, 600, named_condition(QuasiPeriodic{0.0}, 2)), 5);
  CHECK(std::abs(r.eigenvalues[0]) < 1e-9);
  const double e1 = std::pow(2 * kPi / L, 2);
  CHECK(rel(r.eigenvalues[1], e1) < 1e-4);
  CHECK(rel(r.eigenvalues[2], e1) < 1e-4);
  const double e2 = 4 * e1;
  CHECK(rel(r.eigenvalues[3], e2) < 1e-4);
  CHECK(rel(r.eigenvalues[4], e2) < 1e-4);
}

TEST_CASE("constant potential shifts the spectrum") {
  const std::vector<double> v(201, 3.0);
  const auto a = solve(assemble(1.0, 200, named_condition(Dirichlet{}, 2)), 3);
  const auto b = solve(assemble(1.0, 200, named_condition(Dirichlet{}, 2), v), 3);
  // the lumped potential matrix differs from the consistent mass by O(h^2)
  for (int k = 0; k < 3; ++k) CHECK(b.eigenvalues[k] - a.eigenvalues[k] == doctest::Approx(3.0).epsilon(1e-3));
  const auto ref = oracle::robin_interval_eigenvalues(1.0, {true, 0.0}, {true, 0.0}, 400.0);
  for (int k = 0; k < 3; ++k) CHECK(b.eigenvalues[k] == doctest::Approx(ref[k] + 3.0).epsilon(1e-3));
  CHECK_THROWS_AS((void)assemble(1.0, 200, named_condition(Dirichlet{}, 2), {1.0, 2.0}), Error);
}

TEST_CASE("multichannel with diagonal boundary decouples") {
  const auto bu = BoundaryUnitary::from_matrix(-CMatrix::Identity(4, 4));
  const auto r = solve(assemble_multichannel(kPi, 200, bu, {0.0, 2.5}), 4);
  // channel 0: 1, 4, 9; channel 1: 3.5, 6.5
  const std::vector<double> ref{1.0, 3.5, 4.0, 6.5};
  for (int k = 0; k < 4; ++k) CHECK(rel(r.eigenvalues[k], ref[k]) < 1e-3);
}

TEST_CASE("assembly preconditions") {
  CHECK_THROWS_AS((void)assemble(1.0, 3, named_condition(Neumann{}, 2)), Error);
  CHECK_THROWS_AS((void)assemble(-1.0, 10, named_condition(Neumann{}, 2)), Error);
  try {
    (void)assemble(1.0, 10, named_condition(Neumann{}, 3));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("Robin ground energy") {
  CHECK(robin_ground_energy(1.0, 0.0) == 0.0);
  const double L = kPi, K = 1.0;
  const auto ref = oracle::robin_interval_eigenvalues(L, {false, K}, {false, K}, 5.0);
  CHECK(robin_ground_energy(L, K) == doctest::Approx(ref[0]).epsilon(1e-10));
}

TEST_CASE("semibound estimates") {
  const auto neu = semibound_estimate(assemble(kPi, 100, named_condition(Neumann{}, 2)), 200, 1);
  CHECK(neu.certified_bound == 0.0);
  CHECK(neu.holds);
  const auto dir = semibound_estimate(assemble(kPi, 100, named_condition(Dirichlet{}, 2)), 200, 1);
  CHECK(dir.certified_bound == 0.0);
  CHECK(dir.lower_bound_estimate >= 0.0);

  const auto rob = semibound_estimate(assemble(kPi, 200, named_condition(Robin{1.0}, 2)), 500, 2);
  const auto ref = oracle::robin_interval_eigenvalues(kPi, {false, 1.0}, {false, 1.0}, 5.0);
  CHECK(rob.certified_bound < 0);
  CHECK(rob.certified_bound == doctest::Approx(ref[0]).epsilon(1e-9));
  CHECK(rob.holds);
  CHECK(rob.lower_bound_estimate >= rob.certified_bound - 1e-9);

  CMatrix g = CMatrix::Identity(2, 2);
  g(0, 0) = std::exp(kI * (kPi - 1e-8));
  CHECK_THROWS_AS((void)semibound_estimate(assemble(1.0, 20, BoundaryUnitary::from_matrix(g)), 10), Error);
}

TEST_CASE("property: random gapped unitaries are bounded below by the Robin bound") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const auto bu = BoundaryUnitary::from_matrix(numeric::random_unitary(2, rng));
    const auto est = semibound_estimate(assemble(2.0, 120, bu), 100, rep);
    CHECK(est.holds);
    CHECK(est.robin_constant == doctest::Approx(numeric::operator_norm(bu.cayley())).epsilon(1e-12));
  }
}

TEST_CASE("representing operator check") {
  SUBCASE("Neumann: passes, normal traces shrink under refinement") {
    double prev = 1e300;
    for (int n : {50, 100, 200, 400}) {
      const auto a = assemble(kPi, n, named_condition(Neumann{}, 2));
      const auto r = solve(a, 4);
      const auto rep = representing_operator_check(a, r);
      CHECK(rep.passed);
      double m = 0.0;
      for (int k = 1; k < 4; ++k) m = std::max(m, rep.normal_traces[k].cwiseAbs().maxCoeff());
      CHECK(m < prev);
      prev = m;
    }
    CHECK(prev < 0.05);
  }
  SUBCASE("Dirichlet passes") {
    const auto a = assemble(kPi, 100, named_condition(Dirichlet{}, 2));
    CHECK(representing_operator_check(a, solve(a, 3)).passed);
  }
  SUBCASE("a non-eigenvector is flagged") {
    const auto a = assemble(kPi, 100, named_condition(Neumann{}, 2));
    auto r = solve(a, 2);
    std::mt19937_64 rng(4);
    r.eigenvectors.col(1) = numeric::random_cvector(101, rng);
    const auto rep = representing_operator_check(a, r);
    CHECK_FALSE(rep.passed);
    CHECK_FALSE(rep.violations.empty());
    CHECK(rep.violations.front().eigen_index == 1);
  }
}

TEST_CASE("eigenvectors are mass-normalized with a real positive peak") {
  const auto a = assemble(1.0, 100, named_condition(Robin{0.5}, 2));
  const auto r = solve(a, 3);
  for (int k = 0; k < 3; ++k) {
    const CVector v = r.eigenvectors.col(k);
    CHECK(std::abs(v.dot(a.mass.cast<cplx>() * v) - 1.0) < 1e-10);
    // first entry of maximal modulus (ties broken towards x = 0)
    const double peak = v.cwiseAbs().maxCoeff();
    Eigen::Index i = 0;
    while (std::abs(v(i)) < peak * (1 - 1e-12)) ++i;
    CHECK(std::abs(v(i).imag()) < 1e-14);
    CHECK(v(i).real() > 0);
  }
  const auto all = solve_all(a);
  CHECK(all.eigenvalues.size() == 101);
  CHECK(all.eigenvalues[0] == doctest::Approx(r.eigenvalues[0]).epsilon(1e-10));
}
