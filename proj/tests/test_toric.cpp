#include <cmath>

#include "doctest.h"
#include "hbar/toric.hpp"

using namespace hbar;

TEST_CASE("rational tori of x^2") {
  const auto h = power_profile(1, 2);
  for (int k = 1; k <= 100; ++k) {
    const auto c = rational_tori_count(h, k);
    REQUIRE(c.faces.size() == 3);
    CHECK(c.faces[0].count == static_cast<std::size_t>(2 * k - 1));
    CHECK(c.total == static_cast<std::size_t>(2 * k + 1));
    CHECK(c.interior_closed == static_cast<std::size_t>(2 * k + 1));
    for (std::size_t j = 0; j < c.faces[0].points.size(); ++j)
      CHECK(c.faces[0].points[j][0] == doctest::Approx((j + 1.0) / (2.0 * k)).epsilon(1e-12));
  }
  CHECK(fixed_point_bound(h, 3) == 16);
  CHECK_THROWS_AS(rational_tori_count(h, 0), Error);
  CHECK_THROWS_AS(fixed_point_bound(h, 0), Error);
}

TEST_CASE("tori counts agree with a gradient scan") {
  // Endpoint slopes avoid (1/k)Z for these k, so open and closed agree.
  const auto h = poly_profile({0.0, 0.2, 0.0, 0.37}, 0.1, 1.3);
  const int n = 1000000;
  for (int k : {1, 3, 7, 20}) {
    std::vector<double> crossings;
    double prev = std::floor(k * h.grad({0.1, 0.0})[0]);
    for (int i = 1; i <= n; ++i) {
      const double x = 0.1 + 1.2 * i / n;
      const double cur = std::floor(k * h.grad({x, 0.0})[0]);
      for (double m = prev; m < cur; ++m) crossings.push_back(x);
      prev = cur;
    }
    const auto c = rational_tori_count(h, k);
    REQUIRE(c.faces[0].count == crossings.size());
    CHECK(c.faces[0].closed == crossings.size());
    for (std::size_t j = 0; j < crossings.size(); ++j)
      CHECK(std::abs(c.faces[0].points[j][0] - crossings[j]) <= 1.2 / n + 1e-12);
  }
}

TEST_CASE("profile constructors") {
  CHECK_THROWS_AS(poly_profile({0.0, 0.0, -1.0}), Error);
  CHECK_THROWS_AS(power_profile(1, 0.5), Error);
  CHECK_THROWS_AS(power_profile(1, 2, 1, 0), Error);
  CHECK_THROWS_AS(table_profile({1.0, 0.5, 2.0}), Error);
  const auto t = table_profile({0.0, 1.0, 2.0}, 0, 1);  // h = x^2
  CHECK(t.h({0.75, 0.0}) == doctest::Approx(0.5625));
  CHECK(rational_tori_count(t, 5).total == 11);
  const auto sep = poly2_profile({{0.0, 0.0, 1.0}, {0.0}, {1.0}}, {0, 1, 0, 1});  // x^2 + y^2
  for (int k = 1; k <= 4; ++k) {
    const auto c = rational_tori_count(sep, k);
    CHECK(c.faces[0].count == static_cast<std::size_t>((2 * k - 1) * (2 * k - 1)));
    CHECK(c.interior_closed == static_cast<std::size_t>((2 * k + 1) * (2 * k + 1)));
    CHECK(c.total == static_cast<std::size_t>((2 * k + 1) * (2 * k + 1)));
  }
  CHECK_THROWS_AS(poly2_profile({{0.0, 0.0, 1.0}, {0.0, 3.0}, {1.0}}, {0, 1, 0, 1}), Error);
}

TEST_CASE("ellipsoid spectra") {
  const EllipsoidSpec e{{1.0, std::sqrt(2.0)}};
  CHECK(e.rationally_independent());
  CHECK(!EllipsoidSpec{{1.0, 1.0}}.rationally_independent());
  CHECK(!EllipsoidSpec{{2.0, 3.0}}.rationally_independent());
  CHECK(ellipsoid_spectrum(e, 10).generator_count == 17);
  CHECK(ellipsoid_spectrum(e, 0).generator_count == 0);
  CHECK_THROWS_AS(ellipsoid_spectrum(EllipsoidSpec{{1.0, 0.0}}, 1), Error);
  CHECK_THROWS_AS(ellipsoid_spectrum(EllipsoidSpec{{}}, 1), Error);
  for (double s : {0.5, 1.0, 3.3, 17.0, 41.9}) {
    std::size_t brute = 0;
    for (double a : e.a)
      for (int m = 1; m <= 100; ++m) brute += m * a <= s;
    CHECK(ellipsoid_spectrum(e, s).generator_count == brute);
  }
  std::vector<double> grid;
  for (int s = 100; s <= 1000; ++s) grid.push_back(s);
  const auto fit = linear_fit(ellipsoid_counts(e, grid));
  CHECK(std::abs(fit.value - (1 + 1 / std::sqrt(2.0))) <= 0.01);
}

TEST_CASE("reeb orbit levels") {
  const auto p = semi_admissible_power(1, 2, 3);
  const auto lv = reeb_orbit_level(p, 1);
  CHECK(lv.r_star == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(lv.action == doctest::Approx(1.25).epsilon(1e-12));
  CHECK_THROWS_AS(reeb_orbit_level(p, 0), Error);
  CHECK_THROWS_AS(reeb_orbit_level(p, 4), Error);
  CHECK_THROWS_AS(reeb_orbit_level(p, 5), Error);
  double prev = 0;
  for (double T = 0.1; T < 4; T += 0.1) {
    const double a = reeb_orbit_level(p, T).action;
    CHECK(a > prev);
    prev = a;
  }
  SemiAdmissibleProfile flat = p;
  flat.h = [](double r) { return r < 2 ? 0.0 : (r - 2) * (r - 2); };
  flat.dh = [](double r) { return r < 2 ? 0.0 : 2 * (r - 2); };
  flat.d2h = [](double r) { return r < 2 ? 0.0 : 2.0; };
  CHECK_NOTHROW(reeb_orbit_level(flat, 1));
  SemiAdmissibleProfile plateau = p;
  plateau.h = [](double r) {
    return r < 2 ? 0.5 * (r - 1) * (r - 1) : r < 2.5 ? r - 1.5 : 1 + (r - 2.5) + (r - 2.5) * (r - 2.5);
  };
  plateau.dh = [](double r) { return r < 2 ? r - 1 : r < 2.5 ? 1.0 : 1 + 2 * (r - 2.5); };
  plateau.d2h = [](double r) { return r < 2 ? 1.0 : r < 2.5 ? 0.0 : 2.0; };
  plateau.r_max = 3;
  CHECK_THROWS_AS(reeb_orbit_level(plateau, 1), Error);
  CHECK_THROWS_AS(semi_admissible_power(1, 1, 3), Error);
}

TEST_CASE("flat torus loops") {
  const LatticeBasis sq;
  CHECK(flat_torus_loop_barcode(sq, 1.5).total() == 12);
  CHECK(flat_torus_loop_barcode(sq, 0.5).total() == 4);
  CHECK(flat_torus_loop_barcode(sq, 1.0).total() == 4);
  const LatticeBasis skew{{1.0, 0.0}, {0.3, 1.7}};
  for (double s : {0.9, 2.0, 7.5, 30.0}) {
    std::size_t brute = 0;
    for (int m = -30; m <= 30; ++m)
      for (int n = -30; n <= 30; ++n) {
        const double x = m + 0.3 * n, y = 1.7 * n;
        brute += (m || n) && x * x + y * y < s;
      }
    CHECK(flat_torus_energies(skew, s).size() == brute);
    CHECK(flat_torus_counts(skew, {s}).counts[0] == 2.0 * brute + 4);
  }
  CHECK_THROWS_AS(flat_torus_energies(LatticeBasis{{1.0, 2.0}, {2.0, 4.0}}, 1), Error);
  std::vector<double> grid;
  for (int s = 100; s <= 1000; s += 10) grid.push_back(s);
  const auto fit = linear_fit(flat_torus_counts(sq, grid));
  CHECK(std::abs(fit.value - 2 * M_PI) <= 0.05 * 2 * M_PI);
}
