#include "coagfrag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "coagfrag/errors.hpp"
#include "coagfrag/quadrature.hpp"

namespace coagfrag {

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_positive(double z, double z1, const char* who) {
  if (!(z > 0.0) || !(z1 > 0.0)) {
    throw DomainError(std::string(who) + ": volumes must be positive (z=" + fmt_g(z) +
                      ", z1=" + fmt_g(z1) + ")");
  }
}

bool cut_off(const KernelSet& set, double z, double z1, Truncation t) {
  return t == Truncation::cutoff && z + z1 > set.n;
}

// Lattice on (0, 1): uniform points, a log-spaced run toward 0 and a run
// accumulating at 1 where the collision kernel peaks on the unit box.
std::vector<double> unit_box_lattice(std::size_t samples) {
  std::vector<double> u;
  for (std::size_t k = 1; k <= samples; ++k) {
    u.push_back(static_cast<double>(k) / static_cast<double>(samples + 1));
  }
  for (int p = 1; p <= 9; ++p) {
    u.push_back(std::pow(10.0, -p));
    u.push_back(1.0 - std::pow(10.0, -p));
  }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

std::vector<double> log_lattice(double lo, double hi, std::size_t samples) {
  std::vector<double> v(samples);
  const double step = std::log(hi / lo) / static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    v[k] = lo * std::exp(step * static_cast<double>(k));
  }
  v.back() = hi;
  return v;
}

// Tracks the worst relative margin of an inequality lhs >= rhs.
struct MarginTracker {
  double worst = std::numeric_limits<double>::infinity();
  std::string witness;

  void observe(double lhs, double rhs, const std::string& where) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    const double margin = (lhs - rhs) / scale;
    if (margin < worst) {
      worst = margin;
      witness = where;
    }
  }
};

constexpr double kRelTol = 1e-12;

}  // namespace

double KernelSet::singular_bound_constant(double w) const {
  return (brk.nu + 2.0) / std::pow(w, 1.0 + brk.nu);
}

double eval_K(const KernelSet& set, double z, double z1, Truncation t) {
  require_positive(z, z1, "eval_K");
  if (cut_off(set, z, z1, t)) return 0.0;
  const double w = set.coag.omega;
  return set.coag.k1 * (std::pow(1.0 + z, w) * std::pow(1.0 + z1, w));
}

double eval_C(const KernelSet& set, double z, double z1, Truncation t) {
  require_positive(z, z1, "eval_C");
  if (cut_off(set, z, z1, t)) return 0.0;
  const double a = set.coll.alpha;
  const double b = set.coll.beta;
  return set.coll.k2 * (std::pow(z, a) * std::pow(z1, b) + std::pow(z1, a) * std::pow(z, b));
}

double eval_B(const KernelSet& set, double z, double z1) {
  require_positive(z, z1, "eval_B");
  if (z >= z1) return 0.0;
  const double nu = set.brk.nu;
  return (nu + 2.0) * std::pow(z, nu) / std::pow(z1, nu + 1.0);
}

FragmentCount fragment_count(const KernelSet& set) {
  const double nu = set.brk.nu;
  if (!(nu > -1.0) || !(nu <= 0.0)) {
    if (nu == -1.0) {
      throw ConfigError("nu=-1 gives an infinite number of fragments per breakage; require -1 < nu <= 0");
    }
    throw ConfigError("nu=" + fmt_g(nu) +
                      " outside the physical range -1 < nu <= 0 (finite fragment count)");
  }
  const double zeta = (nu + 2.0) / (nu + 1.0);
  return {zeta, static_cast<int>(std::ceil(zeta))};
}

std::vector<RangeViolation> check_parameter_ranges(const KernelSet& set) {
  std::vector<RangeViolation> out;
  const auto& k = set.coag;
  const auto& c = set.coll;
  const double nu = set.brk.nu;

  if (!std::isfinite(k.k1) || k.k1 < 0.0) {
    out.push_back({"k1", "k1=" + fmt_g(k.k1) + " violates (H3): k1 >= 0", true});
  }
  if (!std::isfinite(k.omega) || k.omega < 0.0 || k.omega >= 1.0) {
    out.push_back({"omega", "omega=" + fmt_g(k.omega) + " violates (H3): 0 <= ω < 1",
                   !std::isfinite(k.omega)});
  }
  if (!std::isfinite(c.k2) || c.k2 < 0.0) {
    out.push_back({"k2", "k2=" + fmt_g(c.k2) + " violates (H4): k2 >= 0", true});
  }
  const bool finite_exp = std::isfinite(c.alpha) && std::isfinite(c.beta);
  if (!finite_exp || !(c.alpha > 0.0) || !(c.alpha < 1.0)) {
    out.push_back({"alpha", "alpha=" + fmt_g(c.alpha) + " violates (H4): 0 < α ≤ β < 1", !finite_exp});
  } else if (c.alpha > c.beta) {
    out.push_back({"alpha", "alpha=" + fmt_g(c.alpha) + " > beta=" + fmt_g(c.beta) +
                                " violates (H4) ordering: 0 < α ≤ β < 1", false});
  }
  if (finite_exp && !(c.beta < 1.0)) {
    out.push_back({"beta", "beta=" + fmt_g(c.beta) + " violates (H4): 0 < α ≤ β < 1", false});
  }
  if (nu == -1.0) {
    out.push_back({"nu", "nu=-1 gives an infinite number of fragments per breakage; require -1 < ν ≤ 0", true});
  } else if (!(nu > -1.0) || !(nu <= 0.0)) {
    out.push_back({"nu", "nu=" + fmt_g(nu) + " outside the physical range -1 < ν ≤ 0", true});
  }
  if (!std::isfinite(set.n) || !(set.n > 0.0)) {
    out.push_back({"n", "n=" + fmt_g(set.n) + " must be a positive truncation volume", true});
  }
  return out;
}

BreakageIdentityReport check_breakage_identities(const KernelSet& set, double z1,
                                                 std::size_t quad_points) {
  if (!(z1 > 0.0)) throw ConfigError("z1 must be positive");
  if (quad_points < 16) {
    throw ConfigError("quad_points=" + std::to_string(quad_points) + " must be at least 16");
  }
  const FragmentCount fc = fragment_count(set);
  const double nu = set.brk.nu;

  auto integrate = [&](std::size_t m) {
    const auto rule = quadrature::singular_unit_interval(m, nu);
    double number = 0.0;
    double mass = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double u = rule.nodes[k];
      const double z = z1 * u;
      // divide the weight back out: B dz = [B z1 / u^nu] u^nu du
      const double f = eval_B(set, z, z1) * z1 / std::pow(u, nu);
      number += rule.weights[k] * f;
      mass += rule.weights[k] * z * f;
    }
    return std::pair{number, mass};
  };

  const auto [number, mass] = integrate(quad_points);
  const auto [number2, mass2] = integrate(2 * quad_points);
  const double drift = std::max(std::abs(number2 - number) / std::max(1.0, std::abs(number2)),
                                std::abs(mass2 - mass) / std::max(1.0, std::abs(mass2)));
  if (drift > 1e-10) {
    throw NumericalError("breakage identity quadrature not converged: residual " + fmt_g(drift));
  }

  BreakageIdentityReport r;
  r.number = number;
  r.mass = mass;
  r.expected_number = fc.zeta;
  r.expected_mass = z1;
  r.number_error = std::abs(number - fc.zeta);
  r.mass_error = std::abs(mass - z1);
  return r;
}

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

HypothesisReport validate_hypotheses(const KernelSet& set, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 8);
  HypothesisReport report;
  const auto ranges = check_parameter_ranges(set);
  auto range_issue = [&](std::initializer_list<const char*> keys) -> std::string {
    for (const auto& v : ranges) {
      for (const char* k : keys) {
        if (v.key == k) return v.message;
      }
    }
    return {};
  };
  const bool nu_ok = range_issue({"nu"}).empty();
  const double zeta = nu_ok ? fragment_count(set).zeta : std::numeric_limits<double>::infinity();

  // symmetry and non-negativity
  {
    HypothesisCheck c{"H1H2", "K, C non-negative and symmetric", true, 0.0, {}};
    const auto zs = log_lattice(1e-6, std::max(set.n, 1.0), samples);
    MarginTracker t;
    bool symmetric = true;
    std::string asym;
    for (double z : zs) {
      for (double z1 : zs) {
        const double k = eval_K(set, z, z1);
        const double cc = eval_C(set, z, z1);
        t.observe(std::min(k, cc), 0.0, "z=" + fmt_g(z) + ", z1=" + fmt_g(z1));
        if (symmetric && (k != eval_K(set, z1, z) || cc != eval_C(set, z1, z))) {
          symmetric = false;
          asym = "asymmetric at z=" + fmt_g(z) + ", z1=" + fmt_g(z1);
        }
      }
    }
    c.worst_margin = t.worst;
    c.passed = symmetric && t.worst >= 0.0;
    c.witness = symmetric ? t.witness : asym;
    report.checks.push_back(c);
  }

  // growth bound on K
  {
    HypothesisCheck c{"H3", "K <= k1 (1+z)^ω (1+z1)^ω, k1 >= 0, 0 <= ω < 1", true, 0.0, {}};
    const auto issue = range_issue({"k1", "omega"});
    const auto zs = log_lattice(1e-6, std::max(set.n, 1.0), samples);
    MarginTracker t;
    for (double z : zs) {
      for (double z1 : zs) {
        const double bound = set.coag.k1 * std::pow(1.0 + z, set.coag.omega) *
                             std::pow(1.0 + z1, set.coag.omega);
        t.observe(bound, eval_K(set, z, z1), "z=" + fmt_g(z) + ", z1=" + fmt_g(z1));
      }
    }
    c.worst_margin = t.worst;
    c.passed = issue.empty() && t.worst >= -kRelTol;
    c.witness = issue.empty() ? t.witness : issue;
    report.checks.push_back(c);
  }

  // local domination of collisions by coagulation on the unit box
  {
    HypothesisCheck c{"H4", "0 < α ≤ β < 1 and K >= 2(ζ-1) C on (0,1)x(0,1)", true, 0.0, {}};
    const auto issue = range_issue({"alpha", "beta", "k2", "nu"});
    if (!issue.empty()) {
      c.passed = false;
      c.worst_margin = -1.0;
      c.witness = issue;
    } else {
      const auto us = unit_box_lattice(samples);
      MarginTracker t;
      for (double z : us) {
        for (double z1 : us) {
          t.observe(eval_K(set, z, z1), 2.0 * (zeta - 1.0) * eval_C(set, z, z1),
                    "z=" + fmt_g(z) + ", z1=" + fmt_g(z1));
        }
      }
      c.worst_margin = t.worst;
      c.passed = t.worst >= -kRelTol;
      c.witness = t.witness;
    }
    report.checks.push_back(c);
  }

  // equi-integrability of the fragment distribution; decided analytically
  // for the power-law family: need p > 1 with nu > -1/p and alpha >= 1 - 1/p
  {
    HypothesisCheck c{"H5", "exists p > 1 with ν > -1/p and α >= 1 - 1/p", true, 0.0, {}};
    const double lower = std::max(-set.brk.nu, 1.0 - set.coll.alpha);
    if (nu_ok && set.coll.alpha > 0.0 && lower < 1.0) {
      const double s = 0.5 * (std::max(lower, 0.0) + 1.0);
      c.passed = true;
      c.worst_margin = 1.0 - lower;
      c.witness = "p=" + fmt_g(1.0 / s);
    } else {
      c.passed = false;
      c.worst_margin = 1.0 - lower;
      c.witness = "no p > 1 exists (nu=" + fmt_g(set.brk.nu) + ", alpha=" + fmt_g(set.coll.alpha) + ")";
    }
    report.checks.push_back(c);
  }

  // B <= k(W) z^-tau2 for z < W < z1
  {
    HypothesisCheck c{"H6", "B <= k(W) z^(-τ2), τ2 = -ν, k(W) = (ν+2)/W^(1+ν), z1 > W", true, 0.0, {}};
    if (!nu_ok) {
      c.passed = false;
      c.worst_margin = -1.0;
      c.witness = range_issue({"nu"});
    } else {
      MarginTracker t;
      for (double w : {1e-2, 1e-1, 1.0, 10.0, std::max(set.n, 1.0)}) {
        const double kw = set.singular_bound_constant(w);
        const auto zs = log_lattice(w * 1e-6, w * (1.0 - 1e-9), samples);
        const auto z1s = log_lattice(w * (1.0 + 1e-9), w * 1e3, samples);
        for (double z : zs) {
          for (double z1 : z1s) {
            t.observe(kw * std::pow(z, -set.tau2()), eval_B(set, z, z1),
                      "W=" + fmt_g(w) + ", z=" + fmt_g(z) + ", z1=" + fmt_g(z1));
          }
        }
      }
      c.worst_margin = t.worst;
      c.passed = t.worst >= -kRelTol;
      c.witness = t.witness;
    }
    report.checks.push_back(c);
  }

  // strong nonlinear fragmentation
  {
    HypothesisCheck c{"UH1", "B C >= B_a z1^η z2^(1+η), B_a = 2(ν+2), 0 < 1+η = (α+β)/2 < 1, z1 >= 1", true, 0.0, {}};
    const double one_eta = 1.0 + set.eta();
    if (!nu_ok) {
      c.passed = false;
      c.worst_margin = -1.0;
      c.witness = range_issue({"nu"});
    } else if (!(one_eta > 0.0) || !(one_eta < 1.0)) {
      c.passed = false;
      c.worst_margin = -1.0;
      c.witness = "1+eta=" + fmt_g(one_eta) + " conflicts with 0 < α ≤ β < 1";
    } else {
      const double ba = set.strong_fragmentation_constant();
      const double eta = set.eta();
      MarginTracker t;
      const auto z1s = log_lattice(1.0, 1e3, samples);
      const auto z2s = log_lattice(1e-4, 1e4, samples);
      std::vector<double> us = {1e-9, 1e-6, 1e-3, 0.1, 0.5, 0.9, 1.0 - 1e-6, 1.0 - 1e-12};
      for (double z1 : z1s) {
        for (double z2 : z2s) {
          const double cc = eval_C(set, z1, z2);
          const double rhs = ba * std::pow(z1, eta) * std::pow(z2, 1.0 + eta);
          for (double u : us) {
            const double z = z1 * u;
            t.observe(eval_B(set, z, z1) * cc, rhs,
                      "z=" + fmt_g(z) + ", z1=" + fmt_g(z1) + ", z2=" + fmt_g(z2));
          }
        }
      }
      c.worst_margin = t.worst;
      c.passed = t.worst >= -kRelTol;
      c.witness = t.witness;
    }
    report.checks.push_back(c);
  }

  return report;
}

}  // namespace coagfrag
