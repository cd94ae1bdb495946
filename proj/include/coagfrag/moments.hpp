#pragma once

#include <cstddef>
#include <vector>

#include "coagfrag/operators.hpp"

namespace coagfrag {

/// M_r = sum_i x_i^r g_i width_i. Throws ConfigError for r < 0.
double moment(const NumberDensity& g, double r);

/// sum_i (1 + x_i) |g_i| width_i, the discrete L1((1+z)dz) norm.
double weighted_norm(const SizeGrid& grid, std::span<const double> g);

/// Time series of moments M_r for a fixed list of orders.
struct MomentTrace {
  std::vector<double> orders;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;  ///< rows[k][m] = M_{orders[m]}(times[k])

  void append(const NumberDensity& g);
  std::vector<double> column(std::size_t m) const;
  std::size_t size() const { return times.size(); }
};

}  // namespace coagfrag
