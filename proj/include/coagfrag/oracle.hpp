#pragma once

#include <cstdint>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "coagfrag/kernels.hpp"
#include "coagfrag/operators.hpp"

namespace coagfrag::oracle {

inline constexpr std::size_t kMaxBruteCells = 8;

/// Direct transcription of the four sectional sums with nested loops over
/// pivots, kernels evaluated pointwise. Shares only the redistribution
/// weights with DiscreteOperator. Throws NumericalError above 8 cells.
RhsBreakdown brute_rhs(const KernelSet& set, const NumberDensity& g);

enum class ReferenceCase { constant_coag_m0, mass_any_config, pure_frag_m0_monotone };

/// Throws ConfigError for an unknown name.
ReferenceCase parse_reference_case(const std::string& name);

struct ReferenceInputs {
  double m0 = 1.0;  ///< M0(0)
  double m1 = 1.0;  ///< M1(0)
  double k1 = 1.0;
};

struct MomentReference {
  std::optional<double> value;  ///< closed-form moment at t
  std::string predicate;        ///< qualitative law when no value exists
};

/// constant_coag_m0: M0(0) / (1 + k1 M0(0) t / 2);  mass_any_config: M1(0);
/// pure_frag_m0_monotone: predicate "non-decreasing".
MomentReference analytic_moment_reference(ReferenceCase which, const ReferenceInputs& in, double t);

struct EquivalenceStats {
  std::size_t cases = 0;
  double worst_relative = 0.0;  ///< max over cases and entries of |op - brute| / |brute|
  std::string worst_case;
};

/// Randomized 8-cell comparison of DiscreteOperator against brute_rhs,
/// cycling through the kernel corners omega in {0, 0.5}, nu in {0, -0.5},
/// alpha = beta in {0.3, 0.5}.
EquivalenceStats randomized_equivalence(std::size_t cases, std::uint64_t seed);

struct WeightIdentityErrors {
  double mass = 0.0;   ///< max_j |sum_i x_i w_ij - x_j| / x_j
  double count = 0.0;  ///< |sum_i w_ij - zeta| / zeta for the source cell
};

/// Discrete fragment-count and mass identities of the breakage weights on
/// `grid`; the count is taken for `source` (defaults to the last cell).
WeightIdentityErrors weight_identity_errors(const SizeGrid& grid, const KernelSet& set,
                                            std::optional<std::size_t> source = std::nullopt);

struct CertificationResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Randomized 8-cell operator equivalence (fixed seed), breakage identity
/// quadrature, discrete weight identities and closed-form moment laws.
std::vector<CertificationResult> run_certification(std::size_t random_cases = 1000,
                                                   std::uint64_t seed = 20240611);

}  // namespace coagfrag::oracle
