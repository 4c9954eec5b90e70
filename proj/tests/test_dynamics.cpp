#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hbar/dynamics.hpp"

using namespace hbar;

namespace {

const Mat2 kCat{{{2, 1}, {1, 1}}};
const double kCatRate = std::log2((3 + std::sqrt(5.0)) / 2);

Point at(double x, double y = 0.0) {
  Point p;
  p.x = {x, y};
  return p;
}

// Fixed points of A^k counted by enumerating the lattice (1/D)Z² mod 1 in
// integer arithmetic; every fixed point lies there for D = |det(A^k − I)|.
std::uint64_t brute_fixed_points(const Mat2& a, int k, std::int64_t d) {
  std::array<std::array<std::int64_t, 2>, 2> p{{{1, 0}, {0, 1}}};
  for (int i = 0; i < k; ++i) {
    std::array<std::array<std::int64_t, 2>, 2> q{};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) q[r][c] = p[r][0] * a[0][c] + p[r][1] * a[1][c];
    p = q;
  }
  auto mod = [&](std::int64_t v) { return ((v % d) + d) % d; };
  std::uint64_t n = 0;
  for (std::int64_t i = 0; i < d; ++i)
    for (std::int64_t j = 0; j < d; ++j)
      if (mod(p[0][0] * i + p[0][1] * j) == i && mod(p[1][0] * i + p[1][1] * j) == j) ++n;
  return n;
}

}  // namespace

TEST_CASE("d_k metric") {
  const auto dbl = DynamicalSystem::circle_degree(2);
  CHECK(dk_distance(dbl, at(0.0), at(0.125), 3) == 0.5);
  CHECK(dk_distance(dbl, at(0.0), at(0.125), 1) == 0.125);
  CHECK(dk_distance(dbl, at(0.9), at(0.1), 1) == doctest::Approx(0.2));
  const auto rot = DynamicalSystem::rotation(0.3);
  CHECK(dk_distance(rot, at(0.1), at(0.2), 50) == doctest::Approx(0.1));
  CHECK_THROWS_AS(dk_distance(dbl, at(0.0), at(0.5), 0), Error);
}

TEST_CASE("map evaluation matches closed forms") {
  Rng rng(7, "eval");
  const auto dbl = DynamicalSystem::circle_degree(2);
  const auto cat = DynamicalSystem::linear_torus(kCat);
  for (int t = 0; t < 1000; ++t) {
    const double x = rng.uniform(), y = rng.uniform();
    const double d = 2 * x - std::floor(2 * x);
    CHECK(std::abs(dbl.apply(at(x)).x[0] - d) <= 1e-12);
    const auto c = cat.apply(at(x, y));
    const double cx = 2 * x + y, cy = x + y;
    CHECK(std::abs(c.x[0] - (cx - std::floor(cx))) <= 1e-12);
    CHECK(std::abs(c.x[1] - (cy - std::floor(cy))) <= 1e-12);
  }
  const auto custom = DynamicalSystem::custom_circle(3, {0.0, 0.05, -0.02, 0.01});
  CHECK(custom.lift({0.25, 0.0})[0] == doctest::Approx(0.75 + 0.05));
  CHECK(custom.lift({0.375, 0.0})[0] == doctest::Approx(1.125 + 0.015));
  CHECK(cat.power(3).matrix() == Mat2{{{13, 8}, {8, 5}}});
  CHECK(dbl.power(4).degree() == 16);
  CHECK(cat.lipschitz() == doctest::Approx((3 + std::sqrt(5.0)) / 2));
}

TEST_CASE("periodic counts") {
  CHECK(periodic_count(DynamicalSystem::linear_torus(kCat), 2).count == 5);
  CHECK(periodic_count(DynamicalSystem::circle_degree(2), 3).count == 7);
  CHECK(periodic_count(DynamicalSystem::circle_degree(-3), 2).count == 8);
  CHECK(periodic_count(DynamicalSystem::shift(3), 4).count == 81);
  for (const Mat2& a : {kCat, Mat2{{{2, 1}, {3, 2}}}, Mat2{{{3, 1}, {1, 1}}}})
    for (int k = 1; k <= 6; ++k) {
      const auto n = linear_periodic_count(a, k);
      CHECK(brute_fixed_points(a, k, static_cast<std::int64_t>(n)) == n);
    }
  // |det(A^k − I)| = λ^k + λ^−k − 2 for the cat map.
  const double lambda = (3 + std::sqrt(5.0)) / 2;
  for (int k = 1; k <= 40; ++k) {
    const double expect = std::pow(lambda, k) + std::pow(lambda, -k) - 2;
    CHECK(static_cast<double>(linear_periodic_count(kCat, k)) == doctest::Approx(expect).epsilon(1e-12));
  }
  GrowthSeries p;
  for (int k = 1; k <= 20; ++k) {
    p.index.push_back(k);
    p.counts.push_back(static_cast<double>(linear_periodic_count(kCat, k)));
  }
  CHECK(std::abs(orbit_growth_entropy(p) - kCatRate) <= 0.01 * kCatRate);

  const auto approx = periodic_count(DynamicalSystem::custom_circle(2, {0.0}), 3);
  CHECK(approx.approximate);
  CHECK(approx.count == 7);
  CHECK(periodic_count(DynamicalSystem::custom_circle(3, {0.0, 0.02, -0.01}), 2).count == 8);
}

TEST_CASE("non-isolated fixed sets are rejected") {
  CHECK_THROWS_AS(periodic_count(DynamicalSystem::rotation(0.25), 4), Error);
  CHECK(periodic_count(DynamicalSystem::rotation(0.25), 3).count == 0);
  CHECK_THROWS_AS(periodic_count(DynamicalSystem::circle_degree(1), 1), Error);
  CHECK_THROWS_AS(periodic_count(DynamicalSystem::linear_torus(Mat2{{{1, 1}, {0, 1}}}), 2), Error);
  CHECK_THROWS_AS(DynamicalSystem::linear_torus(Mat2{{{1, 2}, {2, 4}}}), Error);
}

TEST_CASE("shift packing is exact") {
  const auto s = DynamicalSystem::shift(2);
  for (auto [k, m] : {std::pair{1, 1}, {2, 2}, {4, 3}, {3, 4}}) {
    const auto r = packing_numbers(s, std::ldexp(1.0, -m), k, 1 << 16, 11);
    CHECK(r.separated == (std::size_t{1} << (k + 2 * m - 2)));
  }
  // The word rule against the metric on random windows.
  Rng rng(3, "shift-pairs");
  for (int t = 0; t < 2000; ++t) {
    const int k = 1 + static_cast<int>(rng.below(5));
    const int m = 1 + static_cast<int>(rng.below(3));
    Point x = s.random_point(rng, k), y = s.random_point(rng, k);
    for (std::size_t i = 0; i < x.word.size(); ++i)
      if (rng.below(4) != 0) y.word[i] = x.word[i];
    bool differ = false;
    for (int i = -(m - 1); i <= k + m - 2; ++i)
      differ = differ || x.word[x.center + i] != y.word[y.center + i];
    CHECK(differ == (dk_distance(s, x, y, k) > std::ldexp(1.0, -m)));
  }
}

TEST_CASE("entropy estimates") {
  const auto dbl = htop_estimate(DynamicalSystem::circle_degree(2), {1.0 / 64, 1.0 / 256}, 1, 7, 1 << 20, 5);
  CHECK(dbl.value == doctest::Approx(1.0).epsilon(0.05));
  const auto rot = htop_estimate(DynamicalSystem::rotation(0.6180339887498949), {1.0 / 64, 1.0 / 256}, 1, 12,
                                 1 << 18, 5);
  CHECK(rot.value <= 0.05);
  const auto sh = htop_estimate(DynamicalSystem::shift(2), {0.25, 0.125}, 1, 8, 1 << 20, 5);
  CHECK(sh.value == doctest::Approx(1.0).epsilon(0.01));
  // h(φ²) = 2 h(φ).
  const auto sq = htop_estimate(DynamicalSystem::circle_degree(2).power(2), {1.0 / 8}, 1, 7, 1 << 18, 5);
  CHECK(std::abs(sq.value - 2 * dbl.value) <= 0.15);
  CHECK_THROWS_AS(htop_estimate(DynamicalSystem::circle_degree(2), {}, 1, 4, 1024, 1), Error);
}

TEST_CASE("serial and parallel estimates agree") {
  const auto sys = DynamicalSystem::linear_torus(kCat);
  const auto a = htop_estimate(sys, {0.25, 0.125}, 1, 4, 1 << 16, 9, Exec::Serial);
  const auto b = htop_estimate(sys, {0.25, 0.125}, 1, 4, 1 << 16, 9, Exec::Parallel);
  REQUIRE(a.per_eps.size() == b.per_eps.size());
  for (std::size_t i = 0; i < a.per_eps.size(); ++i) {
    CHECK(a.per_eps[i].separated == b.per_eps[i].separated);
    CHECK(a.per_eps[i].cover == b.per_eps[i].cover);
  }
  CHECK(a.value == b.value);
}

TEST_CASE("volume growth") {
  const double lambda = (3 + std::sqrt(5.0)) / 2;
  const double ux = 1.0, uy = lambda - 2;  // (A − λ)(ux, uy) = 0
  const auto cat = volume_growth(DynamicalSystem::linear_torus(kCat), {{0.0, 0.0}, {0.1 * ux, 0.1 * uy}}, 12);
  for (std::size_t k = 1; k < cat.lengths.size(); ++k)
    CHECK(cat.lengths.counts[k] / cat.lengths.counts[k - 1] == doctest::Approx(lambda).epsilon(1e-9));
  CHECK(cat.fit.value == doctest::Approx(kCatRate).epsilon(1e-6));
  const auto rot = volume_growth(DynamicalSystem::rotation(0.3), {{0.0, 0.0}, {0.5, 0.0}}, 10);
  CHECK(rot.fit.value == doctest::Approx(0.0));
  const auto graph = graph_volume_growth(DynamicalSystem::circle_degree(2), 12);
  CHECK(graph.lengths.counts[3] == doctest::Approx(std::hypot(1.0, 8.0)));
  CHECK(graph.fit.value <= 1.0 + 1e-9);
  CHECK(graph.fit.value >= 0.95);
  const auto bent = volume_growth(DynamicalSystem::custom_circle(2, {0.0, 0.1, 0.0, -0.1}), {{0.0, 0.0}, {1.0, 0.0}}, 8);
  CHECK(bent.lengths.counts[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(volume_growth(DynamicalSystem::shift(2), {{0, 0}, {1, 0}}, 4), Error);
}

TEST_CASE("exact periodic orbits") {
  for (int k : {1, 5, 20, 50}) {
    const auto orbit = exact_periodic_orbit(kCat, k, {1, 2});
    CHECK(orbit.size() == static_cast<std::size_t>(k));
    CHECK(pseudo_orbit_defect(DynamicalSystem::linear_torus(kCat), orbit) <= 1e-12);
  }
  CHECK_THROWS_AS(exact_periodic_orbit(Mat2{{{1, 0}, {0, 1}}}, 1, {0, 0}), Error);
}

TEST_CASE("shadowing") {
  const auto sys = DynamicalSystem::linear_torus(kCat);
  Rng rng(21, "shadow");
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(15));
    const double eta = 1e-4;
    auto z = exact_periodic_orbit(kCat, k, {static_cast<std::int64_t>(rng.below(50)), static_cast<std::int64_t>(rng.below(50))});
    for (auto& p : z) {
      const double r = 0.25 * eta * std::sqrt(rng.uniform()), th = 2 * M_PI * rng.uniform();
      p.x = {p.x[0] + r * std::cos(th), p.x[1] + r * std::sin(th)};
      for (auto& c : p.x) c -= std::floor(c);
    }
    const double defect = pseudo_orbit_defect(sys, z);
    const auto sh = shadow_linear(kCat, z);
    CHECK(pseudo_orbit_defect(sys, sh.orbit) <= 1e-10);
    CHECK(sh.distance <= sh.constant * defect + 1e-12);
    CHECK(sh.constant == doctest::Approx(std::sqrt(5.0)).epsilon(1e-9));

    // Oracle: (I − A^k) e_0 = Σ_j A^{k−1−j} δ_j.
    std::array<double, 2> rhs{0, 0};
    for (int j = 0; j < k; ++j) {
      const auto& p = z[j].x;
      const auto& q = z[(j + 1) % k].x;
      std::array<double, 2> d{2 * p[0] + p[1] - q[0], p[0] + p[1] - q[1]};
      for (auto& c : d) c -= std::round(c);
      rhs = {2 * rhs[0] + rhs[1] + d[0], rhs[0] + rhs[1] + d[1]};
    }
    double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    for (int i = 0; i < k; ++i) {
      const double n00 = 2 * m00 + m10, n01 = 2 * m01 + m11, n10 = m00 + m10, n11 = m01 + m11;
      m00 = n00, m01 = n01, m10 = n10, m11 = n11;
    }
    const double b00 = 1 - m00, b01 = -m01, b10 = -m10, b11 = 1 - m11;
    const double det = b00 * b11 - b01 * b10;
    const double e0 = (b11 * rhs[0] - b01 * rhs[1]) / det, e1 = (-b10 * rhs[0] + b00 * rhs[1]) / det;
    double g0 = sh.orbit[0].x[0] - z[0].x[0], g1 = sh.orbit[0].x[1] - z[0].x[1];
    g0 -= std::round(g0);
    g1 -= std::round(g1);
    CHECK(std::abs(g0 - e0) <= 1e-12);
    CHECK(std::abs(g1 - e1) <= 1e-12);
  }
  CHECK_THROWS_AS(shadow_linear(Mat2{{{0, -1}, {1, 0}}}, {at(0.1, 0.2)}), Error);
}
