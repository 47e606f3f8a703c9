#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rlab/diagnostics.hpp"
#include "rlab/errors.hpp"
#include "rlab/maximize.hpp"

using namespace rlab;

namespace {

Density gaussian(const DiscreteMeasure& mu) {
  Density h;
  for (std::size_t j = 0; j < mu.size(); ++j) h.coeffs.push_back(std::exp(-0.5 * mu.point(j)[0] * mu.point(j)[0]));
  return normalized(mu, h);
}

}  // namespace

TEST_CASE("Brezis-Lieb gap vanishes in the trivial cases") {
  const auto mu = build_family(Family::Parabola1D, 2.0, 32);
  const SpaceGrid grid({10.0, 2.0}, {40, 16});
  const auto h = oracle::random_density(32, 1);
  CHECK(brezis_lieb_gap(mu, grid, 6.0, h, h) == 0.0);
  CHECK(brezis_lieb_gap(mu, grid, 6.0, h, Density{std::vector<Complex>(32)}) == 0.0);
  CHECK_THROWS_AS(brezis_lieb_gap(mu, grid, 2.0, h, h), InvalidArgument);
  CHECK_THROWS_AS(brezis_lieb_gap(Field{{1.0}}, Field{{1.0}}, grid, 6.0), InvalidArgument);
}

TEST_CASE("Brezis-Lieb gap decreases as a bump escapes") {
  const auto mu = build_family(Family::Parabola1D, 4.0, 128);
  const SpaceGrid grid({20.0, 1.0}, {160, 8});
  const Density bar = gaussian(mu);
  // Beyond a shift of about 11 the gap sits on the floor set by the slowly
  // decaying tails of the truncated Gaussian.
  double first = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= 10; ++s) {
    const double shift[] = {1.0 * s, 0.0};
    const Density bump = translate_modulate(mu, bar, shift);
    Density hn = bar;
    for (std::size_t j = 0; j < mu.size(); ++j) hn.coeffs[j] += bump.coeffs[j];
    const double gap = brezis_lieb_gap(mu, grid, 6.0, hn, bar);
    CHECK(gap < prev);
    if (s == 0) first = gap;
    prev = gap;
  }
  CHECK(prev < 1e-7 * first);
}

TEST_CASE("dichotomy examples") {
  auto r = dichotomy_check(1.0, 0.0, 6.0);
  CHECK(r.delta == 0.0);
  CHECK(r.verdict == Dichotomy::MassOnLimit);
  r = dichotomy_check(0.0, 1.0, 6.0);
  CHECK(r.delta == 0.0);
  CHECK(r.verdict == Dichotomy::MassEscaped);
  const double s = std::sqrt(0.5);
  r = dichotomy_check(s, s, 6.0);
  CHECK(r.delta == doctest::Approx(std::pow(2.0, -2.0 / 3.0) - 1.0).epsilon(1e-14));
  CHECK(r.delta == doctest::Approx(-0.370039475052563).epsilon(1e-13));
  CHECK(r.verdict == Dichotomy::Undetermined);
  CHECK(r.threshold == kDichotomyThreshold);
  CHECK_THROWS_AS(dichotomy_check(1.0, 1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(dichotomy_check(-1.0, 1.0, 4.0), InvalidArgument);
}

TEST_CASE("dichotomy delta is nonpositive with equality only on the axes") {
  for (double p : {3.0, 4.0, 6.0, 8.0}) {
    for (int i = 0; i < 100; ++i)
      for (int k = 0; k < 100; ++k) {
        const double a = i / 99.0, b = k / 99.0;
        const double delta = dichotomy_check(b, a, p).delta;
        CHECK(delta <= 0.0);
        if (i == 0 || k == 0)
          CHECK(delta == 0.0);
        else
          CHECK(delta < 0.0);
      }
  }
}

TEST_CASE("interpolation inequality") {
  const SpaceGrid grid({3.0, 2.0}, {32, 32});
  const Field c{std::vector<Complex>(grid.size(), Complex(1.5, -0.5))};
  const auto eq = interpolation_check(c, grid, 6.0, 4.0);
  CHECK(std::abs(eq.slack) < 1e-12);
  CHECK(eq.ok);
  CHECK(eq.theta == doctest::Approx(2.0 / 3.0));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = interpolation_check(oracle::random_field(grid.size(), seed), grid, 6.0, 4.0);
    CHECK(r.ok);
    CHECK(r.slack >= 0.0);
  }
  CHECK_THROWS_AS(interpolation_check(c, grid, 4.0, 6.0), InvalidArgument);
  CHECK_THROWS_AS(interpolation_check(c, grid, 4.0, 1.0), InvalidArgument);
}

TEST_CASE("gradient bound") {
  const Atom one[] = {{{0.6, -0.8}, 2.0}};
  const auto mu = build_custom(one, 2);
  const auto grid = SpaceGrid::cube(2, 2.0, 6);
  const auto eq = gradient_bound_check(mu, Density{{Complex(0.0, 0.5)}}, grid);
  CHECK(eq.measured_ratio == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eq.ok);

  const Atom origin[] = {{{0.0, 0.0}, 1.0}};
  CHECK(gradient_bound_check(build_custom(origin, 2), Density{{1.0}}, grid).measured_ratio == 0.0);

  const auto par = build_family(Family::Parabola1D, 1.0, 32);
  const auto r = gradient_bound_check(par, gaussian(par), SpaceGrid({10.0, 10.0}, {32, 32}));
  CHECK(r.measured_ratio > 0.0);
  CHECK(r.measured_ratio <= 1.0);
  CHECK_THROWS_AS(gradient_bound_check(par, Density{std::vector<Complex>(32)}, grid), InvalidArgument);
}

TEST_CASE("interpolation exponent sits between the endpoint and p") {
  const auto par = build_family(Family::Parabola1D, 1.0, 4);
  CHECK(interpolation_exponent(par, 8.0) == 7.0);
  CHECK(interpolation_exponent(par, 6.0) == 4.0);
  const Atom one[] = {{{0.0}, 1.0}};
  CHECK(interpolation_exponent(build_custom(one, 1), 4.0) == 3.0);
}

TEST_CASE("solver report") {
  const auto mu = build_family(Family::Parabola1D, 1.0, 16);
  const SpaceGrid grid({12.0, 12.0}, {48, 48});
  RunConfig cfg;
  cfg.p = 8.0;
  cfg.check_iterates = true;
  const auto run = solve(mu, grid, cfg);
  const auto& d = run.diagnostics;
  CHECK(d.weak_mass <= 1.0 + 1e-10);
  CHECK(d.weak_mass > 0.99);
  CHECK(d.dichotomy.verdict == Dichotomy::MassOnLimit);
  CHECK(d.interpolation_checked);
  CHECK(d.interpolation_ok);
  CHECK(d.gradient_bound_ok);
  CHECK(d.theta > 0.0);
  CHECK(d.theta < 1.0);
  CHECK(1.0 / 8.0 == doctest::Approx(d.theta / d.p_bar));
  CHECK(d.checked_iterates == run.ratio_history.size());
  const std::string footer = to_footer(d);
  CHECK(footer.find("# dichotomy=mass_on_limit\n") != std::string::npos);
  CHECK(footer.find("# theta=") != std::string::npos);
}
