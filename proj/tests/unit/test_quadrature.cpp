#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coagfrag/quadrature.hpp"

namespace q = coagfrag::quadrature;

namespace {

double apply(const q::Rule& r, double (*f)(double)) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

}  // namespace

TEST_CASE("Gauss-Legendre integrates monomials up to degree 2m-1") {
  for (std::size_t m : {1u, 2u, 5u, 8u, 16u}) {
    const auto r = q::gauss_legendre(m);
    for (std::size_t d = 0; d < 2 * m; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += r.weights[i] * std::pow(r.nodes[i], static_cast<double>(d));
      const double exact = d % 2 ? 0.0 : 2.0 / static_cast<double>(d + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("nodes are sorted and interior, weights positive") {
  const auto r = q::gauss_jacobi(12, 0.3, -0.6);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    CHECK(r.nodes[i] > -1.0);
    CHECK(r.nodes[i] < 1.0);
    CHECK(r.weights[i] > 0.0);
    if (i > 0) CHECK(r.nodes[i - 1] < r.nodes[i]);
  }
}

TEST_CASE("singular rule on (0,1) reproduces Beta-function moments") {
  // int_0^1 u^nu u^k du = 1 / (nu + k + 1)
  for (double nu : {0.0, -0.25, -0.5, -0.75, -0.95}) {
    const auto r = q::singular_unit_interval(10, nu);
    for (int k = 0; k < 20; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      CHECK(s == doctest::Approx(1.0 / (nu + k + 1.0)).epsilon(1e-13));
    }
  }
}

TEST_CASE("smooth non-polynomial integrand converges") {
  const double exact = 2.0 * std::sin(1.0);
  const double coarse = std::abs(apply(q::gauss_legendre(3), [](double x) { return std::cos(x); }) - exact);
  const double fine = std::abs(apply(q::gauss_legendre(8), [](double x) { return std::cos(x); }) - exact);
  CHECK(fine < coarse);
  CHECK(fine < 1e-14);
}
