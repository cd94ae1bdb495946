#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "coagfrag/errors.hpp"
#include "coagfrag/kernels.hpp"

using namespace coagfrag;

namespace {

KernelSet make(double k1, double omega, double k2, double alpha, double beta, double nu, double n = 10.0) {
  KernelSet s;
  s.coag = {k1, omega};
  s.coll = {k2, alpha, beta};
  s.brk = {nu};
  s.n = n;
  return s;
}

bool has_key(const std::vector<RangeViolation>& v, const std::string& key) {
  for (const auto& r : v) if (r.key == key) return true;
  return false;
}

}  // namespace

TEST_CASE("coagulation kernel values") {
  CHECK(eval_K(make(1, 0, 0, .5, .5, 0), 3, 5) == 1.0);
  CHECK(eval_K(make(2, .5, 0, .5, .5, 0, 20), 3, 8) == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(eval_K(make(1, 0, 0, .5, .5, 0, 10), 6, 5, Truncation::cutoff) == 0.0);
  CHECK(eval_K(make(1, 0, 0, .5, .5, 0, 10), 6, 4, Truncation::cutoff) == 1.0);
}

TEST_CASE("collision kernel values") {
  CHECK(eval_C(make(0, 0, 1, .5, .5, 0), 1, 1) == 2.0);
  CHECK(eval_C(make(0, 0, 1, .25, .75, 0, 20), 16, 1) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(eval_C(make(0, 0, 1, .5, .5, 0, 10), 9, 4, Truncation::cutoff) == 0.0);
}

TEST_CASE("breakup kernel values and support") {
  CHECK(eval_B(make(0, 0, 1, .5, .5, 0), 0.5, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_B(make(0, 0, 1, .5, .5, 0), 3, 2) == 0.0);
  CHECK(eval_B(make(0, 0, 1, .5, .5, 0), 2, 2) == 0.0);
  CHECK(eval_B(make(0, 0, 1, .5, .5, -.5), 0.25, 1) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(eval_B(make(0, 0, 1, .5, .5, 0), 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_K(make(1, 0, 0, .5, .5, 0), -1.0, 1.0), DomainError);
}

TEST_CASE("property: symmetry, non-negativity and exact truncation agreement") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double alpha = 0.05 + 0.9 * u(rng);
    const double beta = alpha + (0.99 - alpha) * u(rng);
    const auto s = make(2 * u(rng), 0.99 * u(rng), 2 * u(rng), alpha, beta, -0.95 * u(rng), 1 + 20 * u(rng));
    const double z = std::pow(10.0, -5 + 6.5 * u(rng));
    const double z1 = std::pow(10.0, -5 + 6.5 * u(rng));
    CHECK(eval_K(s, z, z1) == eval_K(s, z1, z));
    CHECK(eval_C(s, z, z1) == eval_C(s, z1, z));
    CHECK(eval_K(s, z, z1) >= 0.0);
    CHECK(eval_C(s, z, z1) >= 0.0);
    CHECK(eval_B(s, z, z1) >= 0.0);
    if (z >= z1) CHECK(eval_B(s, z, z1) == 0.0);
    const bool inside = z + z1 <= s.n;
    CHECK(eval_K(s, z, z1, Truncation::cutoff) == (inside ? eval_K(s, z, z1) : 0.0));
    CHECK(eval_C(s, z, z1, Truncation::cutoff) == (inside ? eval_C(s, z, z1) : 0.0));
  }
}

TEST_CASE("fragment count") {
  CHECK(fragment_count(make(0, 0, 1, .5, .5, 0)).zeta == 2.0);
  CHECK(fragment_count(make(0, 0, 1, .5, .5, 0)).bound == 2);
  CHECK(fragment_count(make(0, 0, 1, .5, .5, -.5)).zeta == doctest::Approx(3.0));
  CHECK(fragment_count(make(0, 0, 1, .5, .5, -.5)).bound == 3);
  CHECK_THROWS_WITH_AS(fragment_count(make(0, 0, 1, .5, .5, -1)), doctest::Contains("infinite"), ConfigError);
  CHECK_THROWS_AS(fragment_count(make(0, 0, 1, .5, .5, 0.2)), ConfigError);

  double prev = INFINITY;
  for (double nu = -0.999; nu <= 0.0; nu += 0.037) {
    const double z = fragment_count(make(0, 0, 1, .5, .5, nu)).zeta;
    CHECK(z < prev);
    prev = z;
  }
  CHECK(fragment_count(make(0, 0, 1, .5, .5, -1 + 1e-9)).zeta > 1e8);
}

TEST_CASE("derived constants") {
  const auto s = make(1, 0, 1, .3, .5, -.25);
  CHECK(s.eta() == doctest::Approx(-0.6));
  CHECK(s.strong_fragmentation_constant() == doctest::Approx(3.5));
  CHECK(s.tau2() == doctest::Approx(0.25));
  // B = (nu+2) z^nu / z1^(nu+1) <= k(W) z^nu for every z1 > W
  CHECK(s.singular_bound_constant(2.0) == doctest::Approx(1.75 / std::pow(2.0, 0.75)));
}

TEST_CASE("breakage identities against the closed-form antiderivative") {
  // number: (nu+2)/(nu+1), mass: z1
  const auto r0 = check_breakage_identities(make(0, 0, 1, .5, .5, 0), 2.0, 16);
  CHECK(r0.number == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r0.mass == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r0.number_error <= 1e-10);
  CHECK(r0.mass_error <= 1e-10);

  const auto r1 = check_breakage_identities(make(0, 0, 1, .5, .5, -.5), 1.0, 16);
  CHECK(std::abs(r1.number - 3.0) <= 1e-8);
  CHECK(std::abs(r1.mass - 1.0) <= 1e-8);

  const auto r2 = check_breakage_identities(make(0, 0, 1, .5, .5, -.5), 4.0, 16);
  CHECK(std::abs(r2.mass - 4.0) <= 1e-8 * 4.0);
  CHECK(r2.mass_error <= 1e-8);

  for (double nu : {0.0, -0.25, -0.5, -0.75}) {
    const auto s = make(0, 0, 1, .5, .5, nu);
    double prev = INFINITY;
    for (std::size_t m : {16u, 32u, 64u}) {
      const auto r = check_breakage_identities(s, 3.0, m);
      const double err = std::max(r.number_error, r.mass_error);
      CHECK(err <= 1e-12);
      CHECK(err <= std::max(prev, 1e-13));
      prev = err;
    }
  }
  CHECK_THROWS_AS(check_breakage_identities(make(0, 0, 1, .5, .5, 0), 0.0, 16), ConfigError);
}

TEST_CASE("parameter ranges name key and hypothesis") {
  auto v = check_parameter_ranges(make(1, 0, 1, 1.2, 1.5, 0));
  REQUIRE(has_key(v, "alpha"));
  bool found = false;
  for (const auto& r : v) found |= r.message.find("alpha=1.2 violates (H4)") != std::string::npos;
  CHECK(found);

  v = check_parameter_ranges(make(1, 0, 1, .6, .4, 0));
  REQUIRE(has_key(v, "alpha"));
  CHECK(v.front().message.find("ordering") != std::string::npos);
  CHECK_FALSE(v.front().fatal);

  v = check_parameter_ranges(make(1, 0, 1, .5, .5, -1));
  REQUIRE(has_key(v, "nu"));
  CHECK(v.front().fatal);

  CHECK(check_parameter_ranges(make(1, .5, 1, .5, .5, -.5)).empty());
  CHECK(has_key(check_parameter_ranges(make(-1, 0, 1, .5, .5, 0)), "k1"));
  CHECK(has_key(check_parameter_ranges(make(1, 1.0, 1, .5, .5, 0)), "omega"));
}

TEST_CASE("H4 domination: pass and fail examples") {
  const auto pass = validate_hypotheses(make(1, 0, .1, .5, .5, 0, 50));
  REQUIRE(pass.find("H4") != nullptr);
  CHECK(pass.find("H4")->passed);
  // K = 1 against 2(zeta-1) C <= 0.4 on the unit box: margin (1 - 0.4) / 1
  CHECK(pass.find("H4")->worst_margin == doctest::Approx(0.6).epsilon(1e-9));

  const auto fail = validate_hypotheses(make(.1, 0, 1, .5, .5, 0, 50));
  const auto* h4 = fail.find("H4");
  REQUIRE(h4 != nullptr);
  CHECK_FALSE(h4->passed);
  CHECK(h4->witness.find("z=1") != std::string::npos);
  CHECK_FALSE(fail.all_passed());
}

TEST_CASE("UH1 with the strong-fragmentation constant") {
  const auto r = validate_hypotheses(make(1, 0, 1, .5, .5, 0, 50));
  const auto* uh1 = r.find("UH1");
  REQUIRE(uh1 != nullptr);
  CHECK(uh1->passed);
  // equality edge z1 = z2 = 1: B C = 2 * 2 = 4 = B_a
  const auto s = make(1, 0, 1, .5, .5, 0, 50);
  const double z = 0.999999;
  CHECK(eval_B(s, z, 1.0) * eval_C(s, 1.0, 1.0) == doctest::Approx(s.strong_fragmentation_constant()));

  CHECK_FALSE(validate_hypotheses(make(1, 0, .5, .5, .5, 0, 50)).find("UH1")->passed);
}

TEST_CASE("H5 analytic certificate and H6 bound") {
  const auto r = validate_hypotheses(make(1, .5, 1, .5, .5, -.5, 50));
  CHECK(r.find("H5")->passed);
  CHECK(r.find("H6")->passed);
  CHECK(r.find("H1H2")->passed);
  CHECK(r.find("H3")->passed);
  CHECK(r.find("nonexistent") == nullptr);
}
