#include "coagfrag/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>

#include "coagfrag/config.hpp"
#include "coagfrag/errors.hpp"
#include "coagfrag/integrator.hpp"

namespace coagfrag::oracle {

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double relative_gap(double a, double b) {
  if (a == b) return 0.0;
  const double d = std::abs(a - b);
  return b != 0.0 ? d / std::abs(b) : (d <= 1e-300 ? 0.0 : std::numeric_limits<double>::infinity());
}

}  // namespace

RhsBreakdown brute_rhs(const KernelSet& set, const NumberDensity& g) {
  const SizeGrid& grid = *g.grid;
  const std::size_t cells = grid.cells();
  if (cells > kMaxBruteCells) {
    throw NumericalError("brute_rhs guard: " + std::to_string(cells) + " cells exceeds " +
                         std::to_string(kMaxBruteCells));
  }
  if (g.values.size() != cells) throw ConfigError("brute_rhs: density does not match its grid");

  RhsBreakdown out;
  out.resize(cells);
  const auto& x = grid.pivots();
  const auto& dx = grid.widths();
  const auto& f = g.values;

  // coagulation: ordered pairs with the 1/2 of the birth integral
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t j = 0; j < cells; ++j) {
      const double k = eval_K(set, x[i], x[j], Truncation::cutoff);
      out.coag_loss[i] += f[i] * k * f[j] * dx[j];
      if (k == 0.0) continue;
      const auto split = redistribution::split_coagulation(grid, x[i] + x[j], set.n);
      if (!split) continue;
      const double events = 0.5 * k * f[i] * dx[i] * f[j] * dx[j];
      out.coag_gain[split->lower] += events * split->w_lower / dx[split->lower];
      out.coag_gain[split->upper] += events * split->w_upper / dx[split->upper];
    }
  }

  // collisional breakage: particle j breaks on meeting particle k
  const auto w = redistribution::breakage_weights(grid, set);
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t j = 0; j < cells; ++j) {
      out.brk_loss[i] += f[i] * eval_C(set, x[i], x[j], Truncation::cutoff) * f[j] * dx[j];
    }
  }
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t j = 0; j < cells; ++j) {
      for (std::size_t k = 0; k < cells; ++k) {
        const double c = eval_C(set, x[j], x[k], Truncation::cutoff);
        out.brk_gain[i] += w[j * cells + i] * c * f[j] * dx[j] * f[k] * dx[k] / dx[i];
      }
    }
  }
  return out;
}

ReferenceCase parse_reference_case(const std::string& name) {
  if (name == "constant_coag_M0" || name == "constant_coag_m0") return ReferenceCase::constant_coag_m0;
  if (name == "mass_any_config") return ReferenceCase::mass_any_config;
  if (name == "pure_frag_M0_monotone" || name == "pure_frag_m0_monotone") {
    return ReferenceCase::pure_frag_m0_monotone;
  }
  throw ConfigError("unknown reference case '" + name + "'");
}

MomentReference analytic_moment_reference(ReferenceCase which, const ReferenceInputs& in, double t) {
  switch (which) {
    case ReferenceCase::constant_coag_m0:
      return {in.m0 / (1.0 + 0.5 * in.k1 * in.m0 * t), {}};
    case ReferenceCase::mass_any_config:
      return {in.m1, {}};
    case ReferenceCase::pure_frag_m0_monotone:
      return {std::nullopt, "non-decreasing"};
  }
  return {};
}

EquivalenceStats randomized_equivalence(std::size_t cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EquivalenceStats stats;
  stats.cases = cases;

  for (std::size_t c = 0; c < cases; ++c) {
    KernelSet set;
    set.coag.omega = (c & 1) ? 0.5 : 0.0;
    set.brk.nu = (c & 2) ? -0.5 : 0.0;
    set.coll.alpha = set.coll.beta = (c & 4) ? 0.5 : 0.3;
    set.coag.k1 = 0.1 + 1.9 * unit(rng);
    set.coll.k2 = 0.1 + 1.9 * unit(rng);
    const double z_min = std::pow(10.0, -3.0 + 2.0 * unit(rng));
    const double z_max = 1.0 + 19.0 * unit(rng);
    set.n = z_max;

    auto grid = std::make_shared<const SizeGrid>(SizeGrid::geometric(z_min, z_max, kMaxBruteCells));
    NumberDensity g = NumberDensity::zeros(grid);
    for (double& v : g.values) v = unit(rng) < 0.2 ? 0.0 : unit(rng);

    const auto fast = DiscreteOperator(set, grid).rhs(g.values);
    const auto slow = brute_rhs(set, g);
    const std::vector<double>* a[] = {&fast.coag_gain, &fast.coag_loss, &fast.brk_gain, &fast.brk_loss};
    const std::vector<double>* b[] = {&slow.coag_gain, &slow.coag_loss, &slow.brk_gain, &slow.brk_loss};
    for (int t = 0; t < 4; ++t) {
      for (std::size_t i = 0; i < kMaxBruteCells; ++i) {
        const double gap = relative_gap((*a[t])[i], (*b[t])[i]);
        if (gap > stats.worst_relative) {
          stats.worst_relative = gap;
          stats.worst_case = "case " + std::to_string(c) + ", term " + std::to_string(t) + ", cell " +
                             std::to_string(i);
        }
      }
    }
  }
  return stats;
}

WeightIdentityErrors weight_identity_errors(const SizeGrid& grid, const KernelSet& set,
                                            std::optional<std::size_t> source) {
  const std::size_t cells = grid.cells();
  const auto w = redistribution::breakage_weights(grid, set);
  WeightIdentityErrors e;
  for (std::size_t j = 0; j < cells; ++j) {
    double mass = 0.0;
    for (std::size_t i = 0; i < cells; ++i) mass += grid.pivot(i) * w[j * cells + i];
    e.mass = std::max(e.mass, std::abs(mass - grid.pivot(j)) / grid.pivot(j));
  }
  const std::size_t j = source.value_or(cells - 1);
  double count = 0.0;
  for (std::size_t i = 0; i < cells; ++i) count += w[j * cells + i];
  const double zeta = fragment_count(set).zeta;
  e.count = std::abs(count - zeta) / zeta;
  return e;
}

std::vector<CertificationResult> run_certification(std::size_t random_cases, std::uint64_t seed) {
  std::vector<CertificationResult> out;

  {
    const auto s = randomized_equivalence(random_cases, seed);
    out.push_back({"operator == brute force (" + std::to_string(s.cases) + " random 8-cell cases)",
                   s.worst_relative <= 1e-12,
                   "worst relative gap " + fmt_g(s.worst_relative) +
                       (s.worst_case.empty() ? "" : " at " + s.worst_case)});
  }

  for (double nu : {0.0, -0.25, -0.5, -0.75}) {
    KernelSet set;
    set.brk.nu = nu;
    double worst = 0.0;
    for (double z1 : {0.5, 1.0, 4.0}) {
      const auto r = check_breakage_identities(set, z1, 16);
      worst = std::max({worst, r.number_error, r.mass_error});
    }
    out.push_back({"breakage identities by quadrature, nu=" + fmt_g(nu), worst <= 1e-8,
                   "max error " + fmt_g(worst)});

    set.n = 1.0;
    const auto grid = SizeGrid::geometric(1e-6, 1.0, 200);
    const auto e = weight_identity_errors(grid, set);
    out.push_back({"discrete breakage weights, nu=" + fmt_g(nu) + " (200 cells)",
                   e.mass <= 1e-14 && e.count <= 0.02,
                   "mass " + fmt_g(e.mass) + ", count " + fmt_g(e.count)});
  }

  {
    // finite-difference check of the closed-form constant-kernel M0 law
    const ReferenceInputs in{1.0, 1.0, 1.0};
    double worst = 0.0;
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
      const double h = 1e-4;
      const auto ref = [&](double s) { return *analytic_moment_reference(ReferenceCase::constant_coag_m0, in, s).value; };
      const double deriv = (ref(t + h) - ref(t - h)) / (2.0 * h);
      const double m = ref(t);
      worst = std::max(worst, std::abs(deriv + 0.5 * in.k1 * m * m));
    }
    out.push_back({"constant-kernel M0 law satisfies its ODE", worst <= 1e-7, "residual " + fmt_g(worst)});
  }

  {
    auto cfg = builtin_config("pure_coagulation");
    cfg.initial.normalize_m0 = true;
    const auto traj = simulate(cfg);
    const double m0 = traj.moments.rows.back()[0];
    const double ref = *analytic_moment_reference(ReferenceCase::constant_coag_m0, {1.0, 1.0, 1.0}, 1.0).value;
    out.push_back({"constant-kernel coagulation M0(1) = 2/3", std::abs(m0 - ref) <= 1e-3,
                   "M0(1)=" + fmt_g(m0) + ", reference " + fmt_g(ref)});
  }

  for (const auto& name : builtin_config_names()) {
    const auto traj = simulate(builtin_config(name));
    const double r = traj.max_mass_residual();
    out.push_back({"mass conservation, " + name, r <= 1e-9, "max |dM1|/M1 = " + fmt_g(r)});
  }

  return out;
}

}  // namespace coagfrag::oracle
