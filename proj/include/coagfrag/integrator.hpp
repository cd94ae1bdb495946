#pragma once

#include <cstddef>
#include <vector>

#include "coagfrag/moments.hpp"
#include "coagfrag/operators.hpp"

namespace coagfrag {

struct TimeControl {
  double t_end = 1.0;
  double dt_init = 1e-3;
  double safety = 0.9;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  double tolerance = 1e-8;  ///< relative step-doubling error per step
  std::vector<double> snapshot_times;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct StepRecord {
  double t = 0.0;   ///< time at the end of the step (start time if rejected)
  double dt = 0.0;
  bool accepted = false;
  double error = 0.0;  ///< step-doubling error estimate
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double mass_residual = 0.0;  ///< |M1(t) - M1(0)| / M1(0)
};

struct Trajectory {
  std::vector<NumberDensity> snapshots;  ///< t = 0 first, then requested times
  MomentTrace moments;                   ///< every accepted step, M0, M1, M2, extras
  std::vector<StepRecord> steps;         ///< accepted and rejected
  NumberDensity final_state;

  std::size_t accepted_steps() const;
  std::size_t rejected_steps() const;
  /// max over recorded times of |M1(t) - M1(0)| / M1(0)
  double max_mass_residual() const;
};

/// One classical RK4 step. Throws ConfigError for dt <= 0 and
/// NumericalError on non-finite or significantly negative stages.
NumberDensity step(const DiscreteOperator& op, const NumberDensity& g, double dt);
NumberDensity step(const KernelSet& set, const NumberDensity& g, double dt);

/// Adaptive RK4 with step doubling. The error norm is the weighted L1 norm
/// with weights (1 + x_i) width_i, relative to the norm of the solution.
/// Snapshot times are hit exactly by shortened steps.
Trajectory integrate(const DiscreteOperator& op, const NumberDensity& g0, const TimeControl& ctl,
                     const std::vector<double>& extra_orders = {});
Trajectory integrate(const KernelSet& set, const NumberDensity& g0, const TimeControl& ctl,
                     const std::vector<double>& extra_orders = {});

}  // namespace coagfrag
