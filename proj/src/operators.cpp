#include "coagfrag/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "coagfrag/errors.hpp"
#include "coagfrag/quadrature.hpp"
#include "coagfrag/simd.hpp"

namespace coagfrag {

namespace {

constexpr double kNegativeClip = 1e-13;
constexpr std::size_t kParallelRows = 256;

void require_size(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " cells, got " +
                      std::to_string(v.size()));
  }
}

}  // namespace

NumberDensity NumberDensity::zeros(std::shared_ptr<const SizeGrid> grid, double time) {
  NumberDensity d;
  d.values.assign(grid->cells(), 0.0);
  d.grid = std::move(grid);
  d.time = time;
  return d;
}

void NumberDensity::validate() {
  if (!grid) throw ConfigError("number density has no grid");
  require_size(values, grid->cells(), "number density");
  if (!(time >= 0.0)) throw ConfigError("number density time must be >= 0");
  sanitize_density(values);
}

void sanitize_density(std::span<double> values) {
  double peak = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericalError("non-finite number density value");
    peak = std::max(peak, std::abs(v));
  }
  const double floor = -kNegativeClip * peak;
  for (double& v : values) {
    if (v < 0.0) {
      if (v < floor) {
        throw NumericalError("negative number density " + std::to_string(v) +
                             " below clipping threshold " + std::to_string(floor));
      }
      v = 0.0;
    }
  }
}

std::vector<double> RhsBreakdown::total() const {
  std::vector<double> t(coag_gain.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = ((coag_gain[i] - coag_loss[i]) + brk_gain[i]) - brk_loss[i];
  }
  return t;
}

void RhsBreakdown::resize(std::size_t n) {
  coag_gain.assign(n, 0.0);
  coag_loss.assign(n, 0.0);
  brk_gain.assign(n, 0.0);
  brk_loss.assign(n, 0.0);
}

namespace redistribution {

std::optional<PivotSplit> split_coagulation(const SizeGrid& grid, double v, double n) {
  if (v > n) return std::nullopt;
  const auto x = grid.pivots();
  const std::size_t last = x.size() - 1;
  if (v <= x.front()) {
    return PivotSplit{0, v / x.front(), 0, 0.0};
  }
  if (v >= x[last]) {
    return PivotSplit{last, v / x[last], last, 0.0};
  }
  // x[k] <= v < x[k + 1]
  const auto it = std::upper_bound(x.begin(), x.end(), v);
  const auto k = static_cast<std::size_t>(it - x.begin()) - 1;
  const double span = x[k + 1] - x[k];
  return PivotSplit{k, (x[k + 1] - v) / span, k + 1, (v - x[k]) / span};
}

std::vector<double> breakage_weights(const SizeGrid& grid, const KernelSet& set) {
  const std::size_t cells = grid.cells();
  const double nu = set.brk.nu;
  const auto singular = quadrature::singular_unit_interval(4, nu);
  const auto legendre = quadrature::gauss_legendre(8);

  auto integrate = [&](double a, double b, double source) {
    if (a == 0.0) {
      double s = 0.0;
      for (std::size_t k = 0; k < singular.nodes.size(); ++k) {
        const double u = singular.nodes[k];
        s += singular.weights[k] * eval_B(set, b * u, source) / std::pow(u, nu);
      }
      return b * s;
    }
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < legendre.nodes.size(); ++k) {
      s += legendre.weights[k] * eval_B(set, mid + half * legendre.nodes[k], source);
    }
    return half * s;
  };

  std::vector<double> w(cells * cells, 0.0);
  for (std::size_t j = 0; j < cells; ++j) {
    const double xj = grid.pivot(j);
    double* col = w.data() + j * cells;
    for (std::size_t i = 0; i <= j; ++i) {
      const double a = (i == 0) ? 0.0 : grid.edge(i);
      const double b = (i < j) ? grid.edge(i + 1) : xj;
      col[i] = integrate(a, b, xj);
    }
    double mass = 0.0;
    for (std::size_t i = 0; i <= j; ++i) mass += grid.pivot(i) * col[i];
    if (!(mass > 0.0)) throw NumericalError("breakage weights carry no mass for source cell " + std::to_string(j));
    const double scale = xj / mass;
    for (std::size_t i = 0; i <= j; ++i) col[i] *= scale;
  }
  return w;
}

}  // namespace redistribution

unsigned worker_count_from_env() {
  const char* env = std::getenv("COAGFRAG_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  const long v = std::strtol(env, nullptr, 10);
  return v > 0 ? static_cast<unsigned>(std::min<long>(v, 256)) : 1u;
}

DiscreteOperator::DiscreteOperator(const KernelSet& set, std::shared_ptr<const SizeGrid> grid)
    : set_(set), grid_(std::move(grid)), workers_(worker_count_from_env()) {
  if (!grid_) throw ConfigError("operator needs a grid");
  for (const auto& v : check_parameter_ranges(set_)) {
    if (v.fatal) throw ConfigError(v.message);
  }
  const double edge = grid_->z_max();
  if (std::abs(edge - set_.n) > 1e-12 * std::max(edge, set_.n)) {
    throw ConfigError("truncation n=" + std::to_string(set_.n) +
                      " does not match the grid right edge z_max=" + std::to_string(edge));
  }

  const std::size_t cells = grid_->cells();
  const auto x = grid_->pivots();
  k_matrix_.assign(cells * cells, 0.0);
  c_matrix_.assign(cells * cells, 0.0);
  for (std::size_t j = 0; j < cells; ++j) {
    for (std::size_t i = 0; i < cells; ++i) {
      k_matrix_[j * cells + i] = eval_K(set_, x[i], x[j], Truncation::cutoff);
      c_matrix_[j * cells + i] = eval_C(set_, x[i], x[j], Truncation::cutoff);
    }
  }

  brk_weights_ = redistribution::breakage_weights(*grid_, set_);
  brk_gain_matrix_.resize(brk_weights_.size());
  for (std::size_t j = 0; j < cells; ++j) {
    for (std::size_t i = 0; i < cells; ++i) {
      brk_gain_matrix_[j * cells + i] = brk_weights_[j * cells + i] / grid_->width(i);
    }
  }

  // coagulation gain as a per-target list of (i, j, coef), i <= j ascending
  std::vector<std::vector<GainEntry>> by_target(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t j = i; j < cells; ++j) {
      const double k = k_matrix_[j * cells + i];
      if (k == 0.0) continue;
      const auto split = redistribution::split_coagulation(*grid_, x[i] + x[j], set_.n);
      if (!split) continue;
      const double f = (i == j) ? 0.5 * k : k;
      if (split->w_lower != 0.0) {
        by_target[split->lower].push_back({i, j, f * split->w_lower / grid_->width(split->lower)});
      }
      if (split->w_upper != 0.0) {
        by_target[split->upper].push_back({i, j, f * split->w_upper / grid_->width(split->upper)});
      }
    }
  }
  gain_offsets_.assign(cells + 1, 0);
  for (std::size_t k = 0; k < cells; ++k) {
    gain_offsets_[k + 1] = gain_offsets_[k] + by_target[k].size();
    gain_entries_.insert(gain_entries_.end(), by_target[k].begin(), by_target[k].end());
  }
  scratch_.resize(3 * cells);
}

void DiscreteOperator::matvec(const std::vector<double>& a, std::span<const double> x,
                              std::span<double> y) const {
  const auto& kt = simd::active();
  const std::size_t n = cells();
  if (workers_ <= 1 || n < kParallelRows) {
    kt.matvec(a.data(), n, n, n, x.data(), y.data());
    return;
  }
  // Row blocks are independent and each row keeps its column order, so the
  // result does not depend on the worker count.
  const std::size_t blocks = std::min<std::size_t>(workers_, n / 64);
  const std::size_t per = ((n + blocks - 1) / blocks + 7) / 8 * 8;
  std::vector<std::jthread> pool;
  for (std::size_t r0 = 0; r0 < n; r0 += per) {
    const std::size_t rows = std::min(per, n - r0);
    pool.emplace_back([&, r0, rows] { kt.matvec(a.data() + r0, n, rows, n, x.data(), y.data() + r0); });
  }
}

void DiscreteOperator::coagulation_terms(std::span<const double> g, std::span<double> gain,
                                         std::span<double> loss) const {
  const std::size_t n = cells();
  require_size(g, n, "coagulation_terms");
  const auto& kt = simd::active();
  std::span<double> number(scratch_.data(), n);
  std::span<double> rate(scratch_.data() + n, n);
  kt.hadamard(g.data(), grid_->widths().data(), number.data(), n);
  matvec(k_matrix_, number, rate);
  kt.hadamard(g.data(), rate.data(), loss.data(), n);

  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t e = gain_offsets_[k]; e < gain_offsets_[k + 1]; ++e) {
      const auto& ge = gain_entries_[e];
      s += ge.coef * (number[ge.i] * number[ge.j]);
    }
    gain[k] = s;
  }
}

void DiscreteOperator::breakage_terms(std::span<const double> g, std::span<double> gain,
                                      std::span<double> loss) const {
  const std::size_t n = cells();
  require_size(g, n, "breakage_terms");
  const auto& kt = simd::active();
  std::span<double> number(scratch_.data(), n);
  std::span<double> rate(scratch_.data() + n, n);
  std::span<double> broken(scratch_.data() + 2 * n, n);
  kt.hadamard(g.data(), grid_->widths().data(), number.data(), n);
  matvec(c_matrix_, number, rate);
  kt.hadamard(g.data(), rate.data(), loss.data(), n);
  kt.hadamard(number.data(), rate.data(), broken.data(), n);
  matvec(brk_gain_matrix_, broken, gain);
}

void DiscreteOperator::rhs(std::span<const double> g, RhsBreakdown& out) const {
  const std::size_t n = cells();
  if (out.coag_gain.size() != n) out.resize(n);
  coagulation_terms(g, out.coag_gain, out.coag_loss);
  breakage_terms(g, out.brk_gain, out.brk_loss);
}

RhsBreakdown DiscreteOperator::rhs(std::span<const double> g) const {
  RhsBreakdown out;
  out.resize(cells());
  rhs(g, out);
  return out;
}

void DiscreteOperator::rhs_total(std::span<const double> g, std::span<double> out) const {
  thread_local RhsBreakdown buf;
  rhs(g, buf);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = ((buf.coag_gain[i] - buf.coag_loss[i]) + buf.brk_gain[i]) - buf.brk_loss[i];
  }
}

RhsBreakdown coagulation_terms(const KernelSet& set, const NumberDensity& g) {
  const DiscreteOperator op(set, g.grid);
  RhsBreakdown out;
  out.resize(op.cells());
  op.coagulation_terms(g.values, out.coag_gain, out.coag_loss);
  return out;
}

RhsBreakdown breakage_terms(const KernelSet& set, const NumberDensity& g) {
  const DiscreteOperator op(set, g.grid);
  RhsBreakdown out;
  out.resize(op.cells());
  op.breakage_terms(g.values, out.brk_gain, out.brk_loss);
  return out;
}

RhsBreakdown rhs(const KernelSet& set, const NumberDensity& g) {
  return DiscreteOperator(set, g.grid).rhs(g.values);
}

double discrete_moment(const SizeGrid& grid, std::span<const double> f, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double xr = (r == 0.0) ? 1.0 : (r == 1.0 ? grid.pivot(i) : std::pow(grid.pivot(i), r));
    s += xr * f[i] * grid.width(i);
  }
  return s;
}

}  // namespace coagfrag
