#pragma once

#include <cstddef>
#include <vector>

#include "coagfrag/config.hpp"
#include "coagfrag/integrator.hpp"
#include "coagfrag/moments.hpp"

namespace coagfrag {

/// Gronwall ceiling on the weighted L1 norm of any truncated solution on [0, T]:
///   V1 = a e^(4 N k2 T b) + (b / 2)(e^(4 N k2 T b) - 1),  V = V1 + 2 b
/// with a = ||g0||_dz and b = ||g0||_zdz.
struct AprioriBounds {
  double V1 = 0.0;
  double V = 0.0;
  double norm_dz = 0.0;
  double norm_zdz = 0.0;
  int N = 0;
  double k2 = 0.0;
  double T = 0.0;
  bool overflow = false;  ///< exponential not representable; V1 = V = +inf
};

AprioriBounds apriori_bounds(double norm_dz, double norm_zdz, int N, double k2, double T);
AprioriBounds apriori_bounds(const NumberDensity& g0, const KernelSet& set, double T);

/// Largest sum (1 + x_i) g_i width_i over the trajectory's accepted steps
/// (from the recorded M0 + M1) and snapshots.
double max_weighted_norm(const Trajectory& traj);

struct WeakResidual {
  std::vector<std::size_t> probes;
  std::vector<double> times;                  ///< snapshot times
  std::vector<std::vector<double>> residual;  ///< [probe][time], normalized by max g0
  double max_residual = 0.0;
};

/// g_i(t) - g_i(0) - int_0^t rhs_i ds at each probe cell, with the time
/// integral taken by the trapezoidal rule over the trajectory's snapshots.
/// Throws NumericalError with fewer than two snapshots.
WeakResidual weak_residual(const Trajectory& traj, const DiscreteOperator& op,
                           const std::vector<std::size_t>& probe_cells);
WeakResidual weak_residual(const Trajectory& traj, const KernelSet& set,
                           const std::vector<std::size_t>& probe_cells);

struct TruncationLevel {
  double n = 0.0;
  double z_min = 0.0;
  std::size_t cells = 0;
  double distance = 0.0;  ///< to the next level; unset (0) on the last one
};

struct TruncationStudy {
  std::vector<TruncationLevel> levels;  ///< doublings + 1 entries
  std::vector<double> distances() const;
};

/// Runs the configuration at truncation n, 2n, 4n, ... with the grid ratio
/// held fixed (z_min is nudged down so a doubling adds a whole number of
/// cells), and measures sum (1 + x_i) |g_i - h_i| width_i between
/// consecutive levels on their common cells at t_end.
TruncationStudy truncation_study(const SimConfig& cfg, std::size_t doublings);

struct HigherMomentTrace {
  double order = 0.0;  ///< 2 + eta - eps
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> integral;  ///< cumulative trapezoid of values
};

/// Throws ConfigError unless 0 < eps <= 1 + eta (eps = 1 + eta gives M1).
HigherMomentTrace higher_moment_trace(const Trajectory& traj, double eta, double eps);

/// int_0^T M_{2+eta-eps} for the configuration on windows n, 2n, 4n, ...
/// (same grid construction as truncation_study).
std::vector<double> higher_moment_integrals(const SimConfig& cfg, double eps, std::size_t doublings);

struct PerturbationResult {
  double delta = 0.0;
  std::vector<double> times;
  std::vector<double> u;  ///< sum (1 + x_i) |g_i - h_i| width_i
  double lambda = 0.0;    ///< smallest rate with u(t) <= u(0) e^(lambda t) at every sample
  double lambda_ls = 0.0; ///< least-squares slope of log u against t
  bool envelope_holds = true;
  double max_u() const;
};

/// Twin runs from g0 and g0 (1 + delta cos z), compared at uniformly spaced
/// times (`samples` intervals over [0, t_end]).
PerturbationResult perturbation_closeness(const SimConfig& cfg, double delta, std::size_t samples = 20);

}  // namespace coagfrag
