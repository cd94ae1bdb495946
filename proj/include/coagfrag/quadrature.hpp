#pragma once

#include <cstddef>
#include <vector>

namespace coagfrag::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule on [-1, 1] for the weight (1 - x)^a (1 + x)^b,
/// a, b > -1, built by the Golub-Welsch eigenvalue method.
/// Exact for polynomials of degree 2m - 1 against that weight.
Rule gauss_jacobi(std::size_t points, double a, double b);

/// Gauss-Legendre on [-1, 1].
inline Rule gauss_legendre(std::size_t points) { return gauss_jacobi(points, 0.0, 0.0); }

/// Rule for integrals of u^nu f(u) over (0, 1): the endpoint singularity
/// sits in the weight, so f is only required to be smooth.
Rule singular_unit_interval(std::size_t points, double nu);

}  // namespace coagfrag::quadrature
