#pragma once

// Small numerical helpers shared by the operator modules.

#include "saext/common.hpp"

#include <functional>
#include <random>
#include <string>

namespace saext::numeric {

/// Composite Simpson weights on a uniform grid with `n_intervals` cells of
/// width `h`. Odd interval counts close with a 3/8 panel on the last three cells.
RVector simpson_weights(int n_intervals, double h);

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Bisection on a sign-changing bracket; stops when the bracket is below `xtol`.
double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-14);

/// Haar-distributed random unitary (QR of a complex Ginibre matrix with the
/// diagonal phases of R removed).
CMatrix random_unitary(int n, std::mt19937_64& rng);

/// Random Hermitian matrix with standard normal entries.
CMatrix random_hermitian(int n, std::mt19937_64& rng);

CVector random_cvector(int n, std::mt19937_64& rng);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Spectral (operator 2-) norm.
double operator_norm(const CMatrix& a);

/// Principal branch angle wrapped to (-pi, pi].
double wrap_angle(double theta);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Von Neumann entropy -sum p log p (natural log) of a probability vector.
double entropy(const std::vector<double>& p);

}  // namespace saext::numeric
