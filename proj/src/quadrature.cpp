#include "coagfrag/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "coagfrag/errors.hpp"

namespace coagfrag::quadrature {

Rule gauss_jacobi(std::size_t points, double a, double b) {
  if (points == 0) throw ConfigError("quadrature needs at least one point");
  if (!(a > -1.0) || !(b > -1.0)) {
    throw ConfigError("Jacobi exponents must exceed -1 (a=" + std::to_string(a) +
                      ", b=" + std::to_string(b) + ")");
  }

  const auto m = static_cast<Eigen::Index>(points);
  const double ab = a + b;
  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 1));

  // three-term recurrence of the monic Jacobi polynomials
  diag(0) = (b - a) / (ab + 2.0);
  for (Eigen::Index k = 1; k < m; ++k) {
    const double s = 2.0 * static_cast<double>(k) + ab;
    diag(k) = (b * b - a * a) / (s * (s + 2.0));
  }
  for (Eigen::Index k = 1; k < m; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + ab;
    double beta;
    if (k == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      beta = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(k - 1) = std::sqrt(beta);
  }

  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));

  Rule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  if (m == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Golub-Welsch eigensolve failed for " + std::to_string(points) + " points");
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    rule.nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0;
  }
  return rule;
}

Rule singular_unit_interval(std::size_t points, double nu) {
  // x = 2u - 1:  (1 + x)^nu dx = 2^(nu + 1) u^nu du
  Rule rule = gauss_jacobi(points, 0.0, nu);
  const double scale = std::pow(2.0, -(nu + 1.0));
  for (std::size_t k = 0; k < points; ++k) {
    rule.nodes[k] = 0.5 * (rule.nodes[k] + 1.0);
    rule.weights[k] *= scale;
  }
  return rule;
}

}  // namespace coagfrag::quadrature
