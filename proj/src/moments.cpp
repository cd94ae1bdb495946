#include "coagfrag/moments.hpp"

#include <cmath>
#include <string>

#include "coagfrag/errors.hpp"

namespace coagfrag {

double moment(const NumberDensity& g, double r) {
  if (!(r >= 0.0)) throw ConfigError("moment order must be >= 0, got " + std::to_string(r));
  return discrete_moment(*g.grid, g.values, r);
}

double weighted_norm(const SizeGrid& grid, std::span<const double> g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s += (1.0 + grid.pivot(i)) * std::abs(g[i]) * grid.width(i);
  }
  return s;
}

void MomentTrace::append(const NumberDensity& g) {
  if (!times.empty() && !(g.time > times.back())) {
    throw NumericalError("moment trace times must increase strictly");
  }
  times.push_back(g.time);
  std::vector<double> row;
  row.reserve(orders.size());
  for (double r : orders) row.push_back(moment(g, r));
  rows.push_back(std::move(row));
}

std::vector<double> MomentTrace::column(std::size_t m) const {
  std::vector<double> c;
  c.reserve(rows.size());
  for (const auto& r : rows) c.push_back(r.at(m));
  return c;
}

}  // namespace coagfrag
