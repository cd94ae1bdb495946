#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "coagfrag/errors.hpp"
#include "coagfrag/moments.hpp"
#include "coagfrag/operators.hpp"
#include "coagfrag/oracle.hpp"

using namespace coagfrag;

namespace {

KernelSet make(double k1, double omega, double k2, double alpha, double beta, double nu, double n) {
  KernelSet s;
  s.coag = {k1, omega};
  s.coll = {k2, alpha, beta};
  s.brk = {nu};
  s.n = n;
  return s;
}

std::shared_ptr<const SizeGrid> grid_of(double z_min, double z_max, std::size_t cells) {
  return std::make_shared<const SizeGrid>(SizeGrid::geometric(z_min, z_max, cells));
}

std::vector<double> random_density(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> g(n);
  for (double& v : g) v = u(rng) < 0.15 ? 0.0 : u(rng);
  return g;
}

double sum_weighted(const SizeGrid& grid, const std::vector<double>& f, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.cells(); ++i) s += std::pow(grid.pivot(i), r) * f[i] * grid.width(i);
  return s;
}

// Breakage weights from the closed-form antiderivative of z^nu:
//   int_a^b (nu+2) z^nu / x^(nu+1) dz = (nu+2)/(nu+1) (b^(nu+1) - a^(nu+1)) / x^(nu+1)
// followed by the mass rescaling of each column.
std::vector<double> closed_form_weights(const SizeGrid& grid, double nu) {
  const std::size_t I = grid.cells();
  std::vector<double> w(I * I, 0.0);
  const double p = nu + 1.0;
  for (std::size_t j = 0; j < I; ++j) {
    const double x = grid.pivot(j);
    double mass = 0.0;
    for (std::size_t i = 0; i <= j; ++i) {
      const double a = i == 0 ? 0.0 : grid.edge(i);
      const double b = i < j ? grid.edge(i + 1) : x;
      w[j * I + i] = (nu + 2.0) / p * (std::pow(b, p) - std::pow(a, p)) / std::pow(x, p);
      mass += grid.pivot(i) * w[j * I + i];
    }
    for (std::size_t i = 0; i <= j; ++i) w[j * I + i] *= x / mass;
  }
  return w;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double rel) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= rel * std::max(std::abs(b[i]), 1e-300));
  }
}

}  // namespace

TEST_CASE("zero density gives zero terms") {
  const auto grid = grid_of(1e-3, 10, 30);
  const DiscreteOperator op(make(1, .5, 1, .5, .5, -.5, 10), grid);
  const auto r = op.rhs(std::vector<double>(30, 0.0));
  for (const auto* v : {&r.coag_gain, &r.coag_loss, &r.brk_gain, &r.brk_loss}) {
    for (double x : *v) CHECK(x == 0.0);
  }
}

TEST_CASE("two-cell hand example: pivots 1 and 3, constant kernel") {
  // edges 0.5, 1.5, 4.5 so pivots are exactly 1 and 3, widths 1 and 3
  const auto grid = grid_of(0.5, 4.5, 2);
  REQUIRE(grid->pivot(0) == doctest::Approx(1.0));
  REQUIRE(grid->pivot(1) == doctest::Approx(3.0));

  const auto split = redistribution::split_coagulation(*grid, 2.0, 4.5);
  REQUIRE(split.has_value());
  CHECK(split->w_lower == doctest::Approx(0.5));
  CHECK(split->w_upper == doctest::Approx(0.5));

  const DiscreteOperator op(make(1, 0, 0, .5, .5, 0, 4.5), grid);
  const std::vector<double> g = {1.0, 0.0};
  const auto r = op.rhs(g);
  // one unit of particles meeting itself: loss g0 K N0 = 1, half as many merger events
  CHECK(r.coag_loss[0] == doctest::Approx(1.0));
  CHECK(r.coag_gain[0] == doctest::Approx(0.25));
  CHECK(r.coag_gain[1] == doctest::Approx(0.25 / 3.0));
  const double mass_in = 1.0 * r.coag_gain[0] * 1.0 + 3.0 * r.coag_gain[1] * 3.0;
  const double mass_out = 1.0 * r.coag_loss[0] * 1.0;
  CHECK(mass_in == doctest::Approx(mass_out).epsilon(1e-14));
}

TEST_CASE("coagulation split preserves number and mass between pivots") {
  const auto grid = grid_of(1e-3, 10, 40);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double v = grid->pivot(0) + (grid->pivot(39) - grid->pivot(0)) * u(rng);
    const auto s = redistribution::split_coagulation(*grid, v, 10);
    REQUIRE(s.has_value());
    CHECK(s->w_lower + s->w_upper == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s->w_lower * grid->pivot(s->lower) + s->w_upper * grid->pivot(s->upper) ==
          doctest::Approx(v).epsilon(1e-14));
  }
  CHECK_FALSE(redistribution::split_coagulation(*grid, 10.5, 10).has_value());
  const auto top = redistribution::split_coagulation(*grid, 9.9, 10);
  REQUIRE(top.has_value());
  CHECK(top->lower == 39);
  CHECK(top->w_lower * grid->pivot(39) == doctest::Approx(9.9));
}

TEST_CASE("breakage weights match the closed-form antiderivative") {
  for (double nu : {0.0, -0.25, -0.5, -0.75}) {
    CAPTURE(nu);
    const auto grid = grid_of(1e-4, 5, 25);
    const auto w = redistribution::breakage_weights(*grid, make(0, 0, 1, .5, .5, nu, 5));
    check_close(w, closed_form_weights(*grid, nu), 1e-12);
  }
}

TEST_CASE("breakage weights: exact mass, count approaching zeta under refinement") {
  for (double nu : {0.0, -0.5}) {
    const auto set = make(0, 0, 1, .5, .5, nu, 1.0);
    const double zeta = (nu + 2) / (nu + 1);
    double prev = INFINITY;
    for (std::size_t cells : {50u, 100u, 200u, 400u}) {
      const auto grid = grid_of(1e-6, 1.0, cells);
      const auto w = redistribution::breakage_weights(*grid, set);
      for (std::size_t j = 0; j < cells; ++j) {
        double mass = 0.0;
        for (std::size_t i = 0; i < cells; ++i) mass += grid->pivot(i) * w[j * cells + i];
        CHECK(std::abs(mass - grid->pivot(j)) <= 1e-14 * grid->pivot(j));
      }
      double count = 0.0;
      for (std::size_t i = 0; i < cells; ++i) count += w[(cells - 1) * cells + i];
      const double err = std::abs(count - zeta) / zeta;
      CHECK(err < prev);
      prev = err;
      if (cells >= 200) CHECK(err <= 0.02);
    }
  }
}

TEST_CASE("property: discrete mass conservation, positivity and quadratic scaling") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const double n = 2 + 40 * u(rng);
    const double alpha = 0.1 + 0.8 * u(rng);
    const auto set = make(2 * u(rng), 0.9 * u(rng), 2 * u(rng), alpha, alpha + (0.95 - alpha) * u(rng),
                          -0.9 * u(rng), n);
    const std::size_t cells = 10 + static_cast<std::size_t>(60 * u(rng));
    const auto grid = grid_of(std::pow(10.0, -5 + 3 * u(rng)), n, cells);
    const DiscreteOperator op(set, grid);
    const auto g = random_density(rng, cells);
    const auto r = op.rhs(g);

    const double m1 = sum_weighted(*grid, g, 1.0);
    CHECK(std::abs(sum_weighted(*grid, r.total(), 1.0)) <= 1e-12 * std::max(m1 * m1, m1));
    CHECK(std::abs(sum_weighted(*grid, r.coag_gain, 1.0) - sum_weighted(*grid, r.coag_loss, 1.0)) <=
          1e-12 * sum_weighted(*grid, r.coag_loss, 1.0) + 1e-300);
    CHECK(std::abs(sum_weighted(*grid, r.brk_gain, 1.0) - sum_weighted(*grid, r.brk_loss, 1.0)) <=
          1e-12 * sum_weighted(*grid, r.brk_loss, 1.0) + 1e-300);
    for (const auto* v : {&r.coag_gain, &r.coag_loss, &r.brk_gain, &r.brk_loss}) {
      for (double x : *v) CHECK(x >= 0.0);
    }

    const double a = 0.1 + 3 * u(rng);
    std::vector<double> ag(g);
    for (double& v : ag) v *= a;
    const auto ra = op.rhs(ag);
    const std::vector<double>* lhs[] = {&ra.coag_gain, &ra.coag_loss, &ra.brk_gain, &ra.brk_loss};
    const std::vector<double>* rhs[] = {&r.coag_gain, &r.coag_loss, &r.brk_gain, &r.brk_loss};
    for (int t = 0; t < 4; ++t) {
      for (std::size_t i = 0; i < cells; ++i) {
        const double expect = a * a * (*rhs[t])[i];
        CHECK(std::abs((*lhs[t])[i] - expect) <= 1e-13 * expect);
      }
    }
  }
}

TEST_CASE("breakage gain from an independent triple sum with swapped collision arguments") {
  std::mt19937_64 rng(23);
  const auto grid = grid_of(1e-3, 12, 24);
  const auto set = make(0, 0, 1.3, .3, .7, -.4, 12);
  const DiscreteOperator op(set, grid);
  const auto g = random_density(rng, 24);
  const auto r = op.rhs(g);
  const auto w = closed_form_weights(*grid, -.4);
  std::vector<double> gain(24, 0.0);
  for (std::size_t i = 0; i < 24; ++i) {
    for (std::size_t k = 0; k < 24; ++k) {
      for (std::size_t j = 0; j < 24; ++j) {
        const double c = eval_C(set, grid->pivot(k), grid->pivot(j), Truncation::cutoff);
        gain[i] += w[j * 24 + i] * c * g[j] * grid->width(j) * g[k] * grid->width(k);
      }
    }
    gain[i] /= grid->width(i);
  }
  check_close(r.brk_gain, gain, 1e-11);
}

TEST_CASE("number balance: pure fragmentation grows, constant coagulation shrinks by the pair count") {
  std::mt19937_64 rng(29);
  const auto grid = grid_of(1e-4, 20, 60);
  const auto g = random_density(rng, 60);

  const auto frag = DiscreteOperator(make(0, 0, 1, .5, .5, -.3, 20), grid).rhs(g);
  CHECK(sum_weighted(*grid, frag.total(), 0.0) >= 0.0);

  const double k1 = 1.7;
  const auto set = make(k1, 0, 0, .5, .5, 0, 20);
  const auto coag = DiscreteOperator(set, grid).rhs(g);
  for (double v : coag.brk_gain) CHECK(v == 0.0);
  for (double v : coag.brk_loss) CHECK(v == 0.0);
  // every admissible pair (x_i + x_j <= n) removes two particles and adds
  // one, or v / x_last of one when the product lands past the last pivot
  const double x_last = grid->pivot(59);
  double expected = 0.0;
  for (std::size_t i = 0; i < 60; ++i) {
    for (std::size_t j = 0; j < 60; ++j) {
      const double v = grid->pivot(i) + grid->pivot(j);
      if (v > 20) continue;
      const double born = v <= x_last ? 1.0 : v / x_last;
      expected += 0.5 * k1 * g[i] * grid->width(i) * g[j] * grid->width(j) * (born - 2.0);
    }
  }
  const double got = sum_weighted(*grid, coag.total(), 0.0);
  CHECK(got <= 0.0);
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("8-cell grids agree with the brute-force oracle") {
  std::mt19937_64 rng(31);
  const auto grid = grid_of(0.01, 6, 8);
  const auto set = make(1.2, .5, .8, .3, .3, -.5, 6);
  NumberDensity g = NumberDensity::zeros(grid);
  g.values = random_density(rng, 8);
  const auto fast = DiscreteOperator(set, grid).rhs(g.values);
  const auto slow = oracle::brute_rhs(set, g);
  check_close(fast.coag_gain, slow.coag_gain, 1e-12);
  check_close(fast.coag_loss, slow.coag_loss, 1e-12);
  check_close(fast.brk_gain, slow.brk_gain, 1e-12);
  check_close(fast.brk_loss, slow.brk_loss, 1e-12);
}

TEST_CASE("operator construction is refused for a grid not ending at n") {
  CHECK_THROWS_AS(DiscreteOperator(make(1, 0, 0, .5, .5, 0, 5), grid_of(1e-3, 10, 10)), ConfigError);
  CHECK_THROWS_AS(DiscreteOperator(make(1, 0, 0, .5, .5, -1, 10), grid_of(1e-3, 10, 10)), ConfigError);
}

TEST_CASE("density sanitation clips rounding-level negatives only") {
  std::vector<double> ok = {1.0, -1e-15, 0.5};
  sanitize_density(ok);
  CHECK(ok[1] == 0.0);
  std::vector<double> bad = {1.0, -1e-6};
  CHECK_THROWS_AS(sanitize_density(bad), NumericalError);
  std::vector<double> nan = {1.0, NAN};
  CHECK_THROWS_AS(sanitize_density(nan), NumericalError);
}

TEST_CASE("worker count changes speed only") {
  std::mt19937_64 rng(37);
  const auto grid = grid_of(1e-4, 30, 300);
  const auto set = make(1, .5, 1, .5, .5, -.5, 30);
  const auto g = random_density(rng, 300);
  ::setenv("COAGFRAG_WORKERS", "1", 1);
  const auto one = DiscreteOperator(set, grid).rhs(g).total();
  ::setenv("COAGFRAG_WORKERS", "4", 1);
  CHECK(worker_count_from_env() == 4);
  const auto four = DiscreteOperator(set, grid).rhs(g).total();
  ::unsetenv("COAGFRAG_WORKERS");
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i] == four[i]);
}
