#include <cmath>

#include "doctest.h"
#include "hbar/growth.hpp"

using namespace hbar;

namespace {

template <class F>
GrowthSeries series(int lo, int hi, F f) {
  GrowthSeries s;
  for (int k = lo; k <= hi; ++k) {
    s.index.push_back(k);
    s.counts.push_back(f(k));
  }
  return s;
}

}  // namespace

TEST_CASE("exponential rates") {
  CHECK(exp_growth_rate(series(1, 30, [](int k) { return 3 * std::exp2(k); })).value ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(exp_growth_rate(series(1, 200, [](int k) { return double(k) * k; })).value <= 0.05);
  for (double rho : {0.5, 1.0, 1.5})
    for (double c : {1.0, 2.5, 7.0}) {
      const auto fit = exp_growth_rate(series(1, 40, [&](int k) { return std::floor(c * std::exp2(rho * k)); }));
      CHECK(std::abs(fit.value - rho) <= 0.05 * rho);
    }
  CHECK(exp_growth_rate(series(1, 20, [](int) { return 0.0; })).value == 0.0);
  CHECK(exp_growth_rate(series(1, 20, [](int) { return 5.0; })).value == doctest::Approx(0.0));
  CHECK_THROWS_AS(exp_growth_rate(series(1, 3, [](int k) { return double(k); })), Error);
  CHECK_THROWS_AS(exp_growth_rate(series(1, 10, [](int k) { return k == 10 ? 1.0 : 0.0; })), Error);
}

TEST_CASE("rate doubles under index doubling") {
  const auto f = [](int k) { return 5 * std::exp2(0.75 * k); };
  const double base = exp_growth_rate(series(1, 24, f)).value;
  const double doubled = exp_growth_rate(series(1, 24, [&](int k) { return f(2 * k); })).value;
  CHECK(doubled == doctest::Approx(2 * base).epsilon(1e-9));
}

TEST_CASE("polynomial degrees") {
  CHECK(std::abs(poly_degree_fit(series(1, 100, [](int k) { return 2.0 * k + 1; })).value - 1) <= 0.05);
  CHECK(std::abs(poly_degree_fit(series(1, 1000, [](int s) { return std::floor(M_PI * s); })).value - 1) <= 0.05);
  CHECK(std::abs(poly_degree_fit(series(1, 100, [](int) { return 4.0; })).value) <= 0.05);
  for (int d : {0, 1, 2})
    CHECK(std::abs(poly_degree_fit(series(1, 200, [&](int k) { return 3 * std::pow(k, d) + 1; })).value - d) <= 0.05);
  CHECK_THROWS_AS(poly_degree_fit(series(1, 5, [](int k) { return double(k); })), Error);
  const auto fit = poly_degree_fit(series(1, 20, [](int k) { return k % 5 == 0 ? 0.0 : double(k); }));
  CHECK(!fit.warnings.empty());
}

TEST_CASE("degree certificates") {
  auto linear = series(1, 100, [](int k) { return 2.0 * k + 1; });
  const auto c1 = toric_bound_check(linear, 1);
  CHECK(c1.pass);
  CHECK(c1.c_0 == 3);
  CHECK(!toric_bound_check(linear, 0).pass);
  const auto expo = series(1, 60, [](int k) { return std::exp2(k); });
  for (int n = 0; n <= 5; ++n) CHECK(!toric_bound_check(expo, n).pass);
  const auto quad = series(1, 100, [](int k) { return double(k) * k; });
  CHECK(!toric_bound_check(quad, 1).pass);
  CHECK(toric_bound_check(quad, 2).pass);
}

TEST_CASE("barcode entropy") {
  std::vector<double> index;
  std::vector<Barcode> same, doubling;
  for (int k = 1; k <= 12; ++k) {
    index.push_back(k);
    Barcode b;
    b.add(0, 3);
    b.add(1, kInf);
    same.push_back(b);
    Barcode d;
    d.add(0, 1, static_cast<std::size_t>(1) << k);
    doubling.push_back(d);
  }
  CHECK(barcode_entropy_estimate(index, same, {0.5, 1.0}).value == 0.0);
  const auto e = barcode_entropy_estimate(index, doubling, {2.0, 0.5});
  CHECK(e.eps.back() == 0.5);
  CHECK(std::abs(e.value - 1.0) <= 0.05);
  CHECK(e.rates.front().value == 0.0);
  CHECK(e.monotone);
  CHECK_THROWS_AS(barcode_entropy_estimate({1, 2, 3}, std::vector<Barcode>(3), {1.0}), Error);
}

TEST_CASE("growth csv round trip") {
  const auto s = series(1, 5, [](int k) { return 0.5 * k; });
  CHECK(growth_from_csv(growth_to_csv(s)).counts == s.counts);
  CHECK_THROWS_AS(growth_from_csv("k,count\n1,2\n1,3\n"), Error);
  CHECK_THROWS_AS(growth_from_csv("k,count\n1;2\n"), Error);
}
