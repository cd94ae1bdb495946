#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace coagfrag {

/// K(z, z1) = k1 (1 + z)^omega (1 + z1)^omega
struct CoagKernelSpec {
  double k1 = 0.0;
  double omega = 0.0;
};

/// C(z, z1) = k2 (z^alpha z1^beta + z1^alpha z^beta)
struct CollisionKernelSpec {
  double k2 = 0.0;
  double alpha = 0.5;
  double beta = 0.5;
};

/// B(z | z1; z2) = (nu + 2) z^nu / z1^(nu + 1) on z < z1, zero otherwise.
/// Independent of the collision partner z2.
struct BreakupKernelSpec {
  double nu = 0.0;
};

struct KernelSet {
  CoagKernelSpec coag;
  CollisionKernelSpec coll;
  BreakupKernelSpec brk;
  double n = 1.0;  ///< truncation volume: K_n, C_n vanish for z + z1 > n

  /// 1 + eta = (alpha + beta) / 2
  double eta() const { return 0.5 * (coll.alpha + coll.beta) - 1.0; }
  /// lower constant of the strong-fragmentation bound, 2 (nu + 2)
  double strong_fragmentation_constant() const { return 2.0 * (brk.nu + 2.0); }
  /// singularity exponent of B near the origin, -nu
  double tau2() const { return -brk.nu; }
  /// smallest admissible k(W) in B <= k(W) z^(-tau2) for z1 > W
  double singular_bound_constant(double w) const;
};

enum class Truncation { none, cutoff };

double eval_K(const KernelSet& set, double z, double z1, Truncation t = Truncation::none);
double eval_C(const KernelSet& set, double z, double z1, Truncation t = Truncation::none);
double eval_B(const KernelSet& set, double z, double z1);

struct FragmentCount {
  double zeta;  ///< (nu + 2) / (nu + 1)
  int bound;    ///< N = ceil(zeta), the integer upper bound on fragments per event
};

/// Throws ConfigError for nu outside (-1, 0].
FragmentCount fragment_count(const KernelSet& set);

/// One out-of-range kernel parameter. `fatal` violations make the model
/// meaningless (e.g. infinitely many fragments) and cannot be overridden.
struct RangeViolation {
  std::string key;
  std::string message;
  bool fatal = false;
};

std::vector<RangeViolation> check_parameter_ranges(const KernelSet& set);

struct BreakageIdentityReport {
  double number = 0.0;          ///< integral of B over (0, z1)
  double mass = 0.0;            ///< integral of z B over (0, z1)
  double expected_number = 0.0; ///< zeta
  double expected_mass = 0.0;   ///< z1
  double number_error = 0.0;
  double mass_error = 0.0;
};

/// Integrates B and zB over (0, z1) with a Gauss-Jacobi rule in u = z / z1
/// whose weight absorbs the z^nu singularity. Throws NumericalError when
/// doubling the rule moves the result by more than 1e-10 (relative).
BreakageIdentityReport check_breakage_identities(const KernelSet& set, double z1,
                                                 std::size_t quad_points);

struct HypothesisCheck {
  std::string id;           ///< H1H2, H3, H4, H5, H6, UH1
  std::string description;
  bool passed = true;
  double worst_margin = 0.0;  ///< min over samples of (lhs - rhs) / scale; negative on failure
  std::string witness;        ///< worst sample point, or the analytic certificate
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool all_passed() const;
  const HypothesisCheck* find(const std::string& id) const;
};

/// Samples each structural condition on lattices with `samples` points per
/// axis. Never throws for a range-valid set; failures are report entries.
HypothesisReport validate_hypotheses(const KernelSet& set, std::size_t samples = 64);

}  // namespace coagfrag
