#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "coagfrag/grid.hpp"
#include "coagfrag/kernels.hpp"

namespace coagfrag {

/// Cell-averaged number density g_i (count / volume^2) on a grid.
struct NumberDensity {
  std::shared_ptr<const SizeGrid> grid;
  std::vector<double> values;
  double time = 0.0;

  static NumberDensity zeros(std::shared_ptr<const SizeGrid> grid, double time = 0.0);

  /// Enforces the density invariants in place; see sanitize_density.
  void validate();
};

/// Clips rounding-level negatives (>= -1e-13 max|g|) to zero. Throws
/// NumericalError on larger negatives or non-finite entries.
void sanitize_density(std::span<double> values);

/// The four integral terms per cell, all in count / volume^2 / time.
struct RhsBreakdown {
  std::vector<double> coag_gain;
  std::vector<double> coag_loss;
  std::vector<double> brk_gain;
  std::vector<double> brk_loss;

  /// coag_gain - coag_loss + brk_gain - brk_loss
  std::vector<double> total() const;
  void resize(std::size_t n);
};

namespace redistribution {

/// Where a coagulation product of volume v lands. Number and mass are both
/// preserved when v lies between two pivots; beyond the last pivot (but
/// inside the truncation volume) only mass is preserved.
struct PivotSplit {
  std::size_t lower = 0;
  double w_lower = 0.0;
  std::size_t upper = 0;
  double w_upper = 0.0;
};

/// nullopt when v exceeds the truncation volume n (the event is dropped).
std::optional<PivotSplit> split_coagulation(const SizeGrid& grid, double v, double n);

/// Column-major I x I matrix: entry (i, j) at [j * I + i] is the number of
/// fragments assigned to cell i when one particle at pivot x_j breaks.
/// Fragments below z_min are folded into the first cell. Each column is
/// rescaled so that sum_i x_i w_ij = x_j.
std::vector<double> breakage_weights(const SizeGrid& grid, const KernelSet& set);

}  // namespace redistribution

/// Sectional right-hand side of the truncated coagulation / collisional
/// breakage equation on a fixed grid. Kernel matrices and redistribution
/// tables are built once at construction; evaluation is allocation-free
/// apart from the output arrays and reuses a scratch buffer, so a single
/// instance must not be evaluated concurrently from several threads.
class DiscreteOperator {
 public:
  /// Throws ConfigError if the grid's right edge differs from set.n or a
  /// kernel parameter is outside the computable range.
  DiscreteOperator(const KernelSet& set, std::shared_ptr<const SizeGrid> grid);

  const KernelSet& kernels() const { return set_; }
  const SizeGrid& grid() const { return *grid_; }
  std::shared_ptr<const SizeGrid> grid_ptr() const { return grid_; }
  std::size_t cells() const { return grid_->cells(); }

  void coagulation_terms(std::span<const double> g, std::span<double> gain,
                         std::span<double> loss) const;
  void breakage_terms(std::span<const double> g, std::span<double> gain,
                      std::span<double> loss) const;

  RhsBreakdown rhs(std::span<const double> g) const;
  void rhs(std::span<const double> g, RhsBreakdown& out) const;

  /// Total right-hand side only.
  void rhs_total(std::span<const double> g, std::span<double> out) const;

  /// Breakage weights as used by the operator (see redistribution).
  std::span<const double> breakage_weight_matrix() const { return brk_weights_; }

 private:
  struct GainEntry {
    std::size_t i;
    std::size_t j;
    double coef;
  };

  void matvec(const std::vector<double>& a, std::span<const double> x, std::span<double> y) const;

  KernelSet set_;
  std::shared_ptr<const SizeGrid> grid_;
  std::vector<double> k_matrix_;       // K_n(x_i, x_j), column-major
  std::vector<double> c_matrix_;       // C_n(x_i, x_j), column-major
  std::vector<double> brk_weights_;    // w_ij
  std::vector<double> brk_gain_matrix_;  // w_ij / width_i
  std::vector<std::size_t> gain_offsets_;  // CSR row starts per target cell
  std::vector<GainEntry> gain_entries_;
  mutable std::vector<double> scratch_;
  unsigned workers_ = 1;
};

RhsBreakdown coagulation_terms(const KernelSet& set, const NumberDensity& g);
RhsBreakdown breakage_terms(const KernelSet& set, const NumberDensity& g);
RhsBreakdown rhs(const KernelSet& set, const NumberDensity& g);

/// Discrete moment sum_i x_i^r f_i width_i of an arbitrary cell array.
double discrete_moment(const SizeGrid& grid, std::span<const double> f, double r);

/// Worker count for row-parallel operator evaluation, from COAGFRAG_WORKERS
/// (default 1). Affects speed only.
unsigned worker_count_from_env();

}  // namespace coagfrag
