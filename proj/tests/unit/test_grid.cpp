#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "coagfrag/errors.hpp"
#include "coagfrag/grid.hpp"

using coagfrag::ConfigError;
using coagfrag::SizeGrid;

TEST_CASE("degenerate and invalid windows are refused with the field name") {
  CHECK_THROWS_WITH_AS(SizeGrid::geometric(1.0, 1.0, 2), doctest::Contains("degenerate"), ConfigError);
  CHECK_THROWS_WITH_AS(SizeGrid::geometric(0.0, 1.0, 4), doctest::Contains("grid.z_min"), ConfigError);
  CHECK_THROWS_WITH_AS(SizeGrid::geometric(-1.0, 1.0, 4), doctest::Contains("grid.z_min"), ConfigError);
  CHECK_THROWS_WITH_AS(SizeGrid::geometric(1e-3, 1.0, 1), doctest::Contains("grid.cells"), ConfigError);
  CHECK_THROWS_AS(SizeGrid::geometric(2.0, 1.0, 4), ConfigError);
  CHECK_THROWS_AS(SizeGrid::geometric(1e-3, INFINITY, 4), ConfigError);
}

TEST_CASE("three decades in three cells give ratio ten") {
  const auto g = SizeGrid::geometric(1e-3, 1.0, 3);
  const double expected[] = {1e-3, 1e-2, 1e-1, 1.0};
  REQUIRE(g.cells() == 3);
  for (int i = 0; i < 4; ++i) CHECK(g.edge(i) == doctest::Approx(expected[i]).epsilon(1e-14));
  CHECK(g.ratio() == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(g.edge(0) == 1e-3);
  CHECK(g.edge(3) == 1.0);
}

TEST_CASE("pivots lie strictly inside their cells") {
  const auto g = SizeGrid::geometric(1e-4, 10.0, 100);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    CHECK(g.edge(i) < g.pivot(i));
    CHECK(g.pivot(i) < g.edge(i + 1));
    CHECK(g.width(i) > 0.0);
    CHECK(g.pivot(i) == doctest::Approx(0.5 * (g.edge(i) + g.edge(i + 1))));
  }
}

TEST_CASE("locate uses left-open right-closed cells") {
  const auto g = SizeGrid::geometric(1.0, 8.0, 3);  // edges 1, 2, 4, 8
  CHECK(g.locate(3.0) == std::optional<std::size_t>(1));
  CHECK_FALSE(g.locate(0.5).has_value());
  CHECK_FALSE(g.locate(1.0).has_value());
  CHECK(g.locate(8.0) == std::optional<std::size_t>(2));
  CHECK_FALSE(g.locate(8.5).has_value());
  for (std::size_t i = 1; i <= 3; ++i) CHECK(g.locate(g.edge(i)) == std::optional<std::size_t>(i - 1));
}

TEST_CASE("property: locate brackets random points, widths tile the window, rebuild is bitwise") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double z_min = std::pow(10.0, -6.0 + 5.0 * u(rng));
    const double z_max = z_min * std::pow(10.0, 0.1 + 6.0 * u(rng));
    const std::size_t cells = 2 + static_cast<std::size_t>(u(rng) * 300);
    const auto g = SizeGrid::geometric(z_min, z_max, cells);

    double sum = 0.0;
    for (double w : g.widths()) sum += w;
    CHECK(std::abs(sum - (z_max - z_min)) <= 1e-12 * (z_max - z_min));
    CHECK(g == SizeGrid::geometric(g.z_min(), g.z_max(), g.cells()));

    for (int k = 0; k < 50; ++k) {
      const double z = z_min * std::pow(z_max / z_min, u(rng));
      if (!(z > z_min) || z > z_max) continue;
      const auto c = g.locate(z);
      REQUIRE(c.has_value());
      CHECK(g.edge(*c) < z);
      CHECK(z <= g.edge(*c + 1));
    }
  }
}

TEST_CASE("extension keeps the leading cells bit-identical") {
  const auto base = SizeGrid::geometric(1e-4, 10.0, 60);
  const auto ext = SizeGrid::extend(base, 20.0, 5);
  REQUIRE(ext.cells() == 65);
  for (std::size_t i = 0; i <= 60; ++i) CHECK(ext.edge(i) == base.edge(i));
  for (std::size_t i = 0; i < 60; ++i) {
    CHECK(ext.pivot(i) == base.pivot(i));
    CHECK(ext.width(i) == base.width(i));
  }
  CHECK(ext.z_max() == 20.0);
  CHECK(ext.edge(61) / ext.edge(60) == doctest::Approx(std::pow(2.0, 0.2)));
  CHECK(SizeGrid::extend(base, 11.0, 1).cells() == 61);
  CHECK_THROWS_AS(SizeGrid::extend(base, 10.0, 3), ConfigError);
  CHECK_THROWS_AS(SizeGrid::extend(base, 20.0, 0), ConfigError);
}
