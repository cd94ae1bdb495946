#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace coagfrag {

/// Geometric partition of the volume axis (z_min, z_max] into cells
/// (e_{i-1}, e_i] with constant ratio e_i / e_{i-1} and midpoint pivots.
///
/// Cells are left-open and right-closed. Indices are zero-based: cell i
/// spans (edges()[i], edges()[i + 1]].
class SizeGrid {
 public:
  /// Throws ConfigError naming the offending field when
  /// z_min <= 0, z_min >= z_max, or cells < 2.
  static SizeGrid geometric(double z_min, double z_max, std::size_t cells);

  /// `base` followed by `extra_cells` geometric cells up to z_max. The
  /// leading cells are bit-identical to those of `base`.
  static SizeGrid extend(const SizeGrid& base, double z_max, std::size_t extra_cells);

  std::size_t cells() const { return pivots_.size(); }
  double z_min() const { return edges_.front(); }
  double z_max() const { return edges_.back(); }
  double ratio() const { return ratio_; }

  std::span<const double> edges() const { return edges_; }
  std::span<const double> pivots() const { return pivots_; }
  std::span<const double> widths() const { return widths_; }

  double edge(std::size_t i) const { return edges_[i]; }
  double pivot(std::size_t i) const { return pivots_[i]; }
  double width(std::size_t i) const { return widths_[i]; }

  /// Cell i with edges[i] < z <= edges[i + 1]; nullopt outside (z_min, z_max].
  std::optional<std::size_t> locate(double z) const;

  friend bool operator==(const SizeGrid&, const SizeGrid&) = default;

 private:
  SizeGrid() = default;
  void fill_cells();

  std::vector<double> edges_;
  std::vector<double> pivots_;
  std::vector<double> widths_;
  double ratio_ = 0.0;
};

}  // namespace coagfrag
