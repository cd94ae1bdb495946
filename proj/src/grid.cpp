#include "coagfrag/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coagfrag/errors.hpp"

namespace coagfrag {

SizeGrid SizeGrid::geometric(double z_min, double z_max, std::size_t cells) {
  if (!(z_min > 0.0) || !std::isfinite(z_min)) {
    throw ConfigError("grid.z_min=" + std::to_string(z_min) + " must be positive and finite");
  }
  if (!std::isfinite(z_max)) {
    throw ConfigError("grid.z_max must be finite");
  }
  if (!(z_min < z_max)) {
    throw ConfigError("grid.z_min=" + std::to_string(z_min) + " >= grid.z_max=" +
                      std::to_string(z_max) + ": degenerate interval");
  }
  if (cells < 2) {
    throw ConfigError("grid.cells=" + std::to_string(cells) + " must be at least 2");
  }

  SizeGrid g;
  const double span = z_max / z_min;
  g.ratio_ = std::pow(span, 1.0 / static_cast<double>(cells));
  g.edges_.resize(cells + 1);
  g.edges_.front() = z_min;
  for (std::size_t i = 1; i < cells; ++i) {
    g.edges_[i] = z_min * std::pow(span, static_cast<double>(i) / static_cast<double>(cells));
  }
  g.edges_.back() = z_max;
  g.fill_cells();
  return g;
}

SizeGrid SizeGrid::extend(const SizeGrid& base, double z_max, std::size_t extra_cells) {
  if (!std::isfinite(z_max) || !(z_max > base.z_max())) {
    throw ConfigError("grid extension needs z_max beyond the base grid's right edge");
  }
  if (extra_cells == 0) throw ConfigError("grid extension needs at least one extra cell");
  SizeGrid g;
  g.edges_ = base.edges_;
  if (extra_cells == 1) {
    g.edges_.push_back(z_max);
  } else {
    const auto tail = geometric(base.z_max(), z_max, extra_cells);
    g.edges_.insert(g.edges_.end(), tail.edges_.begin() + 1, tail.edges_.end());
  }
  g.ratio_ = std::pow(z_max / g.edges_.front(), 1.0 / static_cast<double>(g.edges_.size() - 1));
  g.fill_cells();
  return g;
}

void SizeGrid::fill_cells() {
  const std::size_t cells = edges_.size() - 1;
  pivots_.resize(cells);
  widths_.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    pivots_[i] = 0.5 * (edges_[i] + edges_[i + 1]);
    widths_[i] = edges_[i + 1] - edges_[i];
  }
}

std::optional<std::size_t> SizeGrid::locate(double z) const {
  if (!(z > edges_.front()) || z > edges_.back()) return std::nullopt;
  // first edge >= z is the right edge of the containing cell
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), z);
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

}  // namespace coagfrag
