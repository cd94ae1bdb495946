#include "coagfrag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coagfrag/errors.hpp"

namespace coagfrag {

namespace {

struct Level {
  SimConfig cfg;
  std::shared_ptr<const SizeGrid> grid;
};

// Domain-doubling levels. The ratio is fixed to 2^(1/m) so that every
// doubling appends exactly m cells, and each grid extends the previous one
// so that the common cells are bit-identical.
std::vector<Level> doubling_levels(const SimConfig& cfg, std::size_t doublings) {
  const double n = cfg.grid.z_max;
  const double decades = std::log(n / cfg.grid.z_min);
  const auto per_doubling = static_cast<std::size_t>(
      std::max(1.0, std::round(static_cast<double>(cfg.grid.cells) * std::log(2.0) / decades)));
  const double log_q = std::log(2.0) / static_cast<double>(per_doubling);
  const auto cells0 = static_cast<std::size_t>(std::max(2.0, std::round(decades / log_q)));
  const double z_min = n * std::exp(-static_cast<double>(cells0) * log_q);

  std::vector<Level> out;
  auto grid = std::make_shared<const SizeGrid>(SizeGrid::geometric(z_min, n, cells0));
  for (std::size_t l = 0; l <= doublings; ++l) {
    if (l > 0) {
      grid = std::make_shared<const SizeGrid>(SizeGrid::extend(*grid, 2.0 * grid->z_max(), per_doubling));
    }
    out.push_back({with_window(cfg, z_min, grid->z_max(), grid->cells()), grid});
  }
  return out;
}

double trapezoid_step(double t0, double t1, double f0, double f1) { return 0.5 * (t1 - t0) * (f0 + f1); }

}  // namespace

AprioriBounds apriori_bounds(double norm_dz, double norm_zdz, int N, double k2, double T) {
  AprioriBounds b;
  b.norm_dz = norm_dz;
  b.norm_zdz = norm_zdz;
  b.N = N;
  b.k2 = k2;
  b.T = T;
  const double exponent = 4.0 * N * k2 * T * norm_zdz;
  const double growth = std::exp(exponent);
  if (!std::isfinite(growth)) {
    b.overflow = true;
    b.V1 = std::numeric_limits<double>::infinity();
    b.V = b.V1;
    return b;
  }
  b.V1 = norm_dz * growth + 0.5 * norm_zdz * std::expm1(exponent);
  b.V = b.V1 + 2.0 * norm_zdz;
  return b;
}

AprioriBounds apriori_bounds(const NumberDensity& g0, const KernelSet& set, double T) {
  if (!(T >= 0.0)) throw ConfigError("apriori_bounds: T must be >= 0");
  const int N = fragment_count(set).bound;
  return apriori_bounds(moment(g0, 0.0), moment(g0, 1.0), N, set.coll.k2, T);
}

double max_weighted_norm(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& row : traj.moments.rows) worst = std::max(worst, row[0] + row[1]);
  for (const auto& s : traj.snapshots) worst = std::max(worst, weighted_norm(*s.grid, s.values));
  return worst;
}

WeakResidual weak_residual(const Trajectory& traj, const DiscreteOperator& op,
                           const std::vector<std::size_t>& probe_cells) {
  if (traj.snapshots.size() < 2) {
    throw NumericalError("weak_residual needs at least two snapshots, got " +
                         std::to_string(traj.snapshots.size()));
  }
  for (std::size_t p : probe_cells) {
    if (p >= op.cells()) throw ConfigError("probe cell " + std::to_string(p) + " outside the grid");
  }
  const auto& g0 = traj.snapshots.front().values;
  const double scale = std::max(*std::max_element(g0.begin(), g0.end()), 1e-300);

  WeakResidual out;
  out.probes = probe_cells;
  out.residual.assign(probe_cells.size(), {});
  std::vector<double> prev_rhs(op.cells());
  std::vector<double> cur_rhs(op.cells());
  std::vector<double> integral(probe_cells.size(), 0.0);

  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    op.rhs_total(s.values, cur_rhs);
    if (k > 0) {
      const double t0 = traj.snapshots[k - 1].time;
      for (std::size_t p = 0; p < probe_cells.size(); ++p) {
        const std::size_t i = probe_cells[p];
        integral[p] += trapezoid_step(t0, s.time, prev_rhs[i], cur_rhs[i]);
      }
    }
    out.times.push_back(s.time);
    for (std::size_t p = 0; p < probe_cells.size(); ++p) {
      const std::size_t i = probe_cells[p];
      const double r = std::abs(s.values[i] - g0[i] - integral[p]) / scale;
      out.residual[p].push_back(r);
      out.max_residual = std::max(out.max_residual, r);
    }
    std::swap(prev_rhs, cur_rhs);
  }
  return out;
}

WeakResidual weak_residual(const Trajectory& traj, const KernelSet& set,
                           const std::vector<std::size_t>& probe_cells) {
  if (traj.snapshots.empty()) throw NumericalError("weak_residual needs at least two snapshots, got 0");
  return weak_residual(traj, DiscreteOperator(set, traj.snapshots.front().grid), probe_cells);
}

std::vector<double> TruncationStudy::distances() const {
  std::vector<double> d;
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) d.push_back(levels[l].distance);
  return d;
}

TruncationStudy truncation_study(const SimConfig& cfg, std::size_t doublings) {
  if (doublings < 2) throw ConfigError("truncation_study needs at least 2 doublings");
  std::vector<NumberDensity> finals;
  TruncationStudy study;
  for (const auto& level : doubling_levels(cfg, doublings)) {
    finals.push_back(simulate(level.cfg, level.grid).final_state);
    study.levels.push_back({level.cfg.kernels.n, level.cfg.grid.z_min, level.grid->cells(), 0.0});
  }
  for (std::size_t l = 0; l + 1 < finals.size(); ++l) {
    const auto& coarse = finals[l];
    const auto& fine = finals[l + 1];
    const SizeGrid& grid = *coarse.grid;
    double d = 0.0;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
      d += (1.0 + grid.pivot(i)) * std::abs(coarse.values[i] - fine.values[i]) * grid.width(i);
    }
    study.levels[l].distance = d;
  }
  return study;
}

HigherMomentTrace higher_moment_trace(const Trajectory& traj, double eta, double eps) {
  if (!(eps > 0.0) || !(eps <= 1.0 + eta)) {
    throw ConfigError("higher_moment_trace: need 0 < eps <= 1 + eta");
  }
  HigherMomentTrace out;
  out.order = 2.0 + eta - eps;

  const auto& orders = traj.moments.orders;
  const auto it = std::find(orders.begin(), orders.end(), out.order);
  if (it != orders.end()) {
    out.times = traj.moments.times;
    out.values = traj.moments.column(static_cast<std::size_t>(it - orders.begin()));
  } else {
    for (const auto& s : traj.snapshots) {
      out.times.push_back(s.time);
      out.values.push_back(moment(s, out.order));
    }
  }
  out.integral.assign(out.values.size(), 0.0);
  for (std::size_t k = 1; k < out.values.size(); ++k) {
    out.integral[k] = out.integral[k - 1] +
                      trapezoid_step(out.times[k - 1], out.times[k], out.values[k - 1], out.values[k]);
  }
  return out;
}

std::vector<double> higher_moment_integrals(const SimConfig& cfg, double eps, std::size_t doublings) {
  const double eta = cfg.kernels.eta();
  std::vector<double> out;
  for (auto level : doubling_levels(cfg, doublings)) {
    level.cfg.outputs.moment_orders.push_back(2.0 + eta - eps);
    const auto trace = higher_moment_trace(simulate(level.cfg, level.grid), eta, eps);
    out.push_back(trace.integral.empty() ? 0.0 : trace.integral.back());
  }
  return out;
}

double PerturbationResult::max_u() const { return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end()); }

PerturbationResult perturbation_closeness(const SimConfig& cfg, double delta, std::size_t samples) {
  if (!(delta >= 0.0) || !(delta < 1.0)) throw ConfigError("perturbation delta must lie in [0, 1)");
  if (samples == 0) throw ConfigError("perturbation needs at least one sample interval");
  const auto grid = cfg.make_grid();
  const DiscreteOperator op(cfg.kernels, grid);

  TimeControl ctl = cfg.time;
  ctl.snapshot_times.clear();
  for (std::size_t k = 1; k <= samples; ++k) {
    ctl.snapshot_times.push_back(cfg.time.t_end * static_cast<double>(k) / static_cast<double>(samples));
  }

  const NumberDensity g0 = cfg.initial_density(grid);
  NumberDensity h0 = g0;
  for (std::size_t i = 0; i < h0.values.size(); ++i) {
    h0.values[i] *= 1.0 + delta * std::cos(grid->pivot(i));
  }

  const auto a = integrate(op, g0, ctl);
  const auto b = integrate(op, h0, ctl);

  PerturbationResult out;
  out.delta = delta;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    const auto& ga = a.snapshots[k].values;
    const auto& gb = b.snapshots[k].values;
    double u = 0.0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
      u += (1.0 + grid->pivot(i)) * std::abs(ga[i] - gb[i]) * grid->width(i);
    }
    out.times.push_back(a.snapshots[k].time);
    out.u.push_back(u);
  }

  const double u0 = out.u.front();
  if (u0 > 0.0) {
    out.lambda = -std::numeric_limits<double>::infinity();
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < out.u.size(); ++k) {
      const double t = out.times[k];
      const double y = std::log(out.u[k] / u0);
      if (t > 0.0) out.lambda = std::max(out.lambda, y / t);
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
      ++m;
    }
    if (out.u.size() == 1) out.lambda = 0.0;
    const double denom = static_cast<double>(m) * stt - st * st;
    out.lambda_ls = denom > 0.0 ? (static_cast<double>(m) * sty - st * sy) / denom : 0.0;
    for (std::size_t k = 0; k < out.u.size(); ++k) {
      if (out.u[k] > u0 * std::exp(out.lambda * out.times[k]) * (1.0 + 1e-12)) out.envelope_holds = false;
    }
    if (!std::isfinite(out.lambda)) out.envelope_holds = false;
  } else {
    out.envelope_holds = std::all_of(out.u.begin(), out.u.end(), [](double v) { return v == 0.0; });
  }
  return out;
}

}  // namespace coagfrag
