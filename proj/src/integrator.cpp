#include "coagfrag/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "coagfrag/errors.hpp"
#include "coagfrag/simd.hpp"

namespace coagfrag {

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_finite(std::span<const double> v, double t, double dt) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericalError("non-finite density during step at t=" + fmt_g(t) + ", dt=" + fmt_g(dt));
    }
  }
}

double weighted_distance(const SizeGrid& grid, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += (1.0 + grid.pivot(i)) * std::abs(a[i] - b[i]) * grid.width(i);
  }
  return s;
}

}  // namespace

void TimeControl::validate() const {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("time.t_end must be finite and >= 0");
  if (!(dt_min > 0.0)) throw ConfigError("time.dt_min must be positive");
  if (!(dt_min <= dt_init)) throw ConfigError("time.dt_init must be >= time.dt_min");
  if (!(dt_init <= dt_max)) throw ConfigError("time.dt_init must be <= time.dt_max");
  if (!(safety > 0.0 && safety < 1.0)) throw ConfigError("time.safety must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw ConfigError("time.tolerance must be positive");
  for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
    const double s = snapshot_times[k];
    if (!(s >= 0.0 && s <= t_end)) {
      throw ConfigError("time.snapshot_times entry " + fmt_g(s) + " outside [0, t_end]");
    }
    if (k > 0 && !(s > snapshot_times[k - 1])) {
      throw ConfigError("time.snapshot_times must be strictly increasing");
    }
  }
}

std::size_t Trajectory::accepted_steps() const {
  return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const auto& s) { return s.accepted; }));
}

std::size_t Trajectory::rejected_steps() const { return steps.size() - accepted_steps(); }

double Trajectory::max_mass_residual() const {
  const auto m1 = moments.column(1);
  if (m1.empty()) return 0.0;
  const double ref = m1.front();
  double worst = 0.0;
  for (double v : m1) {
    worst = std::max(worst, ref > 0.0 ? std::abs(v - ref) / ref : std::abs(v - ref));
  }
  return worst;
}

NumberDensity step(const DiscreteOperator& op, const NumberDensity& g, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("step: dt must be positive and finite, got " + fmt_g(dt));
  }
  const std::size_t n = op.cells();
  if (g.values.size() != n) throw ConfigError("step: density does not match the operator grid");
  const auto& kt = simd::active();

  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
  op.rhs_total(g.values, k1);
  check_finite(k1, g.time, dt);

  kt.axpy(g.values.data(), 0.5 * dt, k1.data(), stage.data(), n);
  check_finite(stage, g.time, dt);
  sanitize_density(stage);
  op.rhs_total(stage, k2);

  kt.axpy(g.values.data(), 0.5 * dt, k2.data(), stage.data(), n);
  check_finite(stage, g.time, dt);
  sanitize_density(stage);
  op.rhs_total(stage, k3);

  kt.axpy(g.values.data(), dt, k3.data(), stage.data(), n);
  check_finite(stage, g.time, dt);
  sanitize_density(stage);
  op.rhs_total(stage, k4);

  NumberDensity out;
  out.grid = g.grid;
  out.values.resize(n);
  out.time = g.time + dt;
  kt.rk4_combine(g.values.data(), dt / 6.0, k1.data(), k2.data(), k3.data(), k4.data(),
                 out.values.data(), n);
  check_finite(out.values, g.time, dt);
  sanitize_density(out.values);
  return out;
}

NumberDensity step(const KernelSet& set, const NumberDensity& g, double dt) {
  return step(DiscreteOperator(set, g.grid), g, dt);
}

Trajectory integrate(const DiscreteOperator& op, const NumberDensity& g0, const TimeControl& ctl,
                     const std::vector<double>& extra_orders) {
  ctl.validate();
  NumberDensity g = g0;
  g.validate();
  if (g.grid->cells() != op.cells()) throw ConfigError("initial density does not match the operator grid");
  const SizeGrid& grid = op.grid();

  Trajectory traj;
  traj.moments.orders = {0.0, 1.0, 2.0};
  traj.moments.orders.insert(traj.moments.orders.end(), extra_orders.begin(), extra_orders.end());
  traj.snapshots.push_back(g);
  traj.moments.append(g);

  const double m1_0 = moment(g, 1.0);
  auto residual = [&](double m1) { return m1_0 > 0.0 ? std::abs(m1 - m1_0) / m1_0 : std::abs(m1 - m1_0); };

  std::vector<double> stops;
  for (double s : ctl.snapshot_times) {
    if (s > 0.0) stops.push_back(s);
  }
  std::size_t next_snap = 0;

  double dt = ctl.dt_init;
  const double t_end = ctl.t_end;
  const double t_eps = 1e-14 * std::max(1.0, t_end);

  while (t_end - g.time > t_eps) {
    const double stop = next_snap < stops.size() ? std::min(stops[next_snap], t_end) : t_end;
    double h = std::min(dt, stop - g.time);
    const bool clipped = h < dt;
    const bool hits_stop = (stop - g.time) <= h * (1.0 + 1e-12);
    if (hits_stop) h = stop - g.time;

    NumberDensity fine;
    double err = std::numeric_limits<double>::infinity();
    try {
      const NumberDensity coarse = step(op, g, h);
      const NumberDensity half = step(op, g, 0.5 * h);
      fine = step(op, half, 0.5 * h);
      const double scale = std::max(weighted_norm(grid, fine.values), 1e-300);
      err = weighted_distance(grid, fine.values, coarse.values) / scale;
    } catch (const NumericalError&) {
      // treated as a rejection; the step is retried at half size
    }

    StepRecord rec;
    rec.dt = h;
    rec.error = err;
    if (err <= ctl.tolerance) {
      fine.time = hits_stop ? stop : g.time + h;
      g = std::move(fine);
      traj.moments.append(g);
      const auto& row = traj.moments.rows.back();
      rec.t = g.time;
      rec.accepted = true;
      rec.m0 = row[0];
      rec.m1 = row[1];
      rec.m2 = row[2];
      rec.mass_residual = residual(row[1]);
      traj.steps.push_back(rec);

      if (hits_stop && next_snap < stops.size() && stop == stops[next_snap]) {
        traj.snapshots.push_back(g);
        ++next_snap;
      }
      const double factor =
          err == 0.0 ? 2.0 : std::clamp(ctl.safety * std::pow(ctl.tolerance / err, 0.2), 0.2, 2.0);
      if (!clipped || factor < 1.0) dt = std::clamp(h * factor, ctl.dt_min, ctl.dt_max);
    } else {
      rec.t = g.time;
      rec.accepted = false;
      rec.m0 = traj.moments.rows.back()[0];
      rec.m1 = traj.moments.rows.back()[1];
      rec.m2 = traj.moments.rows.back()[2];
      rec.mass_residual = residual(rec.m1);
      traj.steps.push_back(rec);
      dt = 0.5 * h;
      if (dt < ctl.dt_min) {
        throw NumericalError("step size underflow at t=" + fmt_g(g.time) + ": dt=" + fmt_g(dt) +
                             " < dt_min=" + fmt_g(ctl.dt_min) + ", error estimate " + fmt_g(err));
      }
    }
  }

  traj.final_state = g;
  return traj;
}

Trajectory integrate(const KernelSet& set, const NumberDensity& g0, const TimeControl& ctl,
                     const std::vector<double>& extra_orders) {
  return integrate(DiscreteOperator(set, g0.grid), g0, ctl, extra_orders);
}

}  // namespace coagfrag
