#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "hbar/bottleneck.hpp"
#include "hbar/instances.hpp"
#include "hbar/sampled_module.hpp"

using namespace hbar;

namespace {

Barcode bars(std::initializer_list<std::pair<double, double>> xs) {
  Barcode b;
  for (auto [s, e] : xs) b.add(s, e);
  return b;
}

/// Bottleneck by trying every assignment of bars to bars or the diagonal.
double brute_bottleneck(const Barcode& a, const Barcode& b) {
  std::vector<Bar> x, y;
  for (const auto& bar : a.bars())
    for (std::size_t k = 0; k < bar.multiplicity; ++k) x.push_back(bar);
  for (const auto& bar : b.bars())
    for (std::size_t k = 0; k < bar.multiplicity; ++k) y.push_back(bar);
  // Pad both sides with diagonal slots; slot index >= size means diagonal.
  const std::size_t n = x.size() + y.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto cost = [](const Bar& p, const Bar* q) -> double {
    if (!q) return p.infinite() ? kInf : p.length() / 2;
    if (p.infinite() != q->infinite()) return kInf;
    double c = std::abs(p.start - q->start);
    if (!p.infinite()) c = std::max(c, std::abs(p.end - q->end));
    return c;
  };
  double best = kInf;
  do {
    double worst = 0;
    for (std::size_t i = 0; i < n && worst < best; ++i) {
      const std::size_t j = perm[i];
      const Bar* left = i < x.size() ? &x[i] : nullptr;
      const Bar* right = j < y.size() ? &y[j] : nullptr;
      if (left && right) worst = std::max(worst, cost(*left, right));
      else if (left) worst = std::max(worst, cost(*left, nullptr));
      else if (right) worst = std::max(worst, cost(*right, nullptr));
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Barcode rank_formula_barcode(const FilteredComplexF2& c) {
  const SampledModule m = sample_module(c);
  std::vector<double> actions;
  for (const auto& g : c.generators()) actions.push_back(g.action);
  return barcode_from_multiplicities(m, actions);
}

}  // namespace

TEST_CASE("barcode function counts with strict inequalities") {
  const Barcode b = bars({{0, 1}, {0, 3}, {2, kInf}});
  CHECK(barcode_function(b, 0.5, 2.5) == 3);
  CHECK(barcode_function(b, 1.5, 1) == 1);
  CHECK(barcode_function(bars({{0, 1}}), 1.0) == 0);
  CHECK_THROWS_AS(barcode_function(b, 0.0), Error);
  CHECK(beta_max(bars({{0, 2}, {1, kInf}})) == 2.0);
  CHECK(beta_max(bars({{0, kInf}})) == 0.0);
}

TEST_CASE("barcode csv round trip keeps infinite ends") {
  Barcode b = bars({{0, 1.5}, {0, 1.5}, {0.25, kInf}});
  const std::string csv = barcode_to_csv(b);
  CHECK(csv.find("inf") != std::string::npos);
  CHECK(barcode_from_csv(csv) == b);
}

TEST_CASE("hand examples of the reduction") {
  SUBCASE("single cycle") {
    FilteredComplexF2 c;
    c.add({"z", 0.7});
    CHECK(reduce_filtered_complex(c).barcode.same_intervals(bars({{0.7, kInf}})));
  }
  SUBCASE("one pair") {
    FilteredComplexF2 c;
    const int b = c.add({"b", 0.0});
    c.add({"a", 5.0}, {b});
    const auto r = reduce_filtered_complex(c);
    CHECK(r.barcode.same_intervals(bars({{0, 5}})));
    REQUIRE(r.pairs.size() == 1);
    CHECK(c.apply_boundary(r.x[0]) == r.y[0]);
  }
  SUBCASE("sphere with four critical values") {
    const auto r = reduce_filtered_complex(sphere_morse_complex());
    CHECK(r.barcode.same_intervals(bars({{0, kInf}, {1, 2}, {3, kInf}})));
  }
  SUBCASE("circle") {
    const auto r = reduce_filtered_complex(circle_complex());
    const auto& bs = r.barcode.bars();
    REQUIRE(bs.size() == 2);
    CHECK(bs[0].start == 0.0);
    CHECK(bs[0].degree == 0);
    CHECK(bs[1].start == 1.0);
    CHECK(bs[1].degree == 1);
    CHECK(bs[1].infinite());
  }
  SUBCASE("constant function") {
    SimplicialComplex k{{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}, {0, 1, 2}}};
    const auto r = reduce_filtered_complex(sublevel_filtration(k, {4, 4, 4}));
    for (const auto& b : r.barcode.bars()) CHECK(b.start == 4.0);
  }
}

TEST_CASE("validation names the offending generator") {
  FilteredComplexF2 c;
  const int b = c.add({"low", 2.0});
  c.add({"high", 1.0}, {b});
  try {
    c.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("high") != std::string::npos);
  }
  FilteredComplexF2 d;
  const int v0 = d.add({"v0", 0}), v1 = d.add({"v1", 0}), v2 = d.add({"v2", 0});
  const int e0 = d.add({"e0", 0}, {v0, v1});
  d.add({"bad", 1}, {e0, v2});
  CHECK_THROWS_AS(d.validate(), Error);
  SimplicialComplex open{{{0}, {0, 1}}};
  CHECK_THROWS_AS(sublevel_filtration(open, {0, 1}), Error);
}

TEST_CASE("svd basis is a valid decomposition on random complexes") {
  Rng rng(11, "svd");
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_filtered_complex(rng, 5, 20);
    const auto r = reduce_filtered_complex(c);
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
      CHECK(c.apply_boundary(r.x[i]) == r.y[i]);
      CHECK(c.chain_action(r.x[i]) == c.action(r.pairs[i].death));
      CHECK(c.chain_action(r.y[i]) == c.action(r.pairs[i].birth));
    }
    for (const auto& z : r.z) CHECK(c.apply_boundary(z).empty());
    CHECK(2 * r.pairs.size() + r.z.size() == c.size());
  }
}

TEST_CASE("interval modules and multiplicities") {
  const std::vector<double> grid{0, 1, 2, 3, 4, 5};
  const auto m = interval_module(1, 4, grid);
  CHECK(barcode_multiplicity(m, 1, 4, 2) == 1);
  CHECK(barcode_multiplicity(m, 1, 4, 3) == 1);
  CHECK(barcode_multiplicity(m, 1, 3, 2) == 0);
  CHECK(barcode_multiplicity(m, 0, 4, 2) == 0);
  CHECK_THROWS_AS(barcode_multiplicity(m, 1, 4, 2.5), Error);
  CHECK_THROWS_AS(barcode_multiplicity(m, -1, 4, 2), Error);

  const std::vector<double> fine{0, 1, 1.5, 2, 3, 4, 5};
  const auto sum = direct_sum(interval_module(1, 2, fine), interval_module(2, 4, fine));
  CHECK(barcode_multiplicity(sum, 1, 4, 1.5) == 0);
  CHECK(barcode_multiplicity(sum, 1, 4, 3) == 0);
  CHECK(barcode_multiplicity(sum, 1, 2, 1.5) == 1);
  CHECK(barcode_multiplicity(sum, 2, 4, 3) == 1);
  // Non-isomorphism witness: rank of the map from t=2 to s=3.
  CHECK(f2::rank(sum.map(3, 4).cols, sum.dim(4)) == 0);
  CHECK(f2::rank(interval_module(1, 4, fine).map(3, 4).cols, 1) == 1);
}

TEST_CASE("sampled module is functorial") {
  Rng rng(5, "functor");
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = random_filtered_complex(rng, 5, 18);
    const auto m = sample_module(c);
    const std::size_t last = m.grid().size() - 1;
    for (std::size_t i = 0; i <= last; i += 2)
      for (std::size_t j = i; j <= last; j += 3) {
        const auto composite = m.map(i, j);
        const auto direct = direct_structure_map(c, m.grid(), i, j);
        CHECK(composite.cols == direct.cols);
      }
  }
}

TEST_CASE("multiplicity does not depend on the interior point") {
  Rng rng(6, "interior");
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = random_filtered_complex(rng, 5, 18);
    const auto m = sample_module(c);
    const auto& g = m.grid();
    const auto r = reduce_filtered_complex(c);
    for (const auto& bar : r.barcode.bars()) {
      std::vector<std::size_t> seen;
      for (double t : g)
        if (bar.start < t && t < bar.end)
          seen.push_back(barcode_multiplicity(m, bar.start, bar.end, t));
      REQUIRE(!seen.empty());
      for (auto s : seen) CHECK(s == seen.front());
      CHECK(seen.front() == bar.multiplicity);
    }
  }
}

TEST_CASE("rank formula matches the reduction on small complexes") {
  std::size_t checked = 0;
  for (const auto& k : tetrahedron_subcomplexes(8)) {
    for (int f = 0; f < 81; f += 7) {
      std::vector<double> values{double(f % 3), double(f / 3 % 3), double(f / 9 % 3),
                                 double(f / 27 % 3)};
      const auto c = sublevel_filtration(k, values);
      CHECK(rank_formula_barcode(c).same_intervals(reduce_filtered_complex(c).barcode));
      ++checked;
    }
  }
  CHECK(checked > 100);
  Rng rng(7, "oracle");
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = random_filtered_complex(rng, 5, 30);
    CHECK(rank_formula_barcode(c).same_intervals(reduce_filtered_complex(c).barcode));
  }
}

TEST_CASE("barcode function is monotone and semicontinuous") {
  Rng rng(8, "monotone");
  for (int trial = 0; trial < 30; ++trial) {
    const auto b = reduce_filtered_complex(random_filtered_complex(rng, 5, 25)).barcode;
    for (double eps : {0.1, 0.25, 0.5, 1.0, 2.0})
      for (double s : {0.5, 1.0, 2.0, 4.0, kInf}) {
        CHECK(barcode_function(b, eps, s) >= barcode_function(b, 2 * eps, s));
        CHECK(barcode_function(b, eps, s) >= barcode_function(b, eps, s / 2));
        // Lengths are multiples of 1/4, so nothing changes just above eps.
        CHECK(barcode_function(b, eps, s) == barcode_function(b, eps + 1e-3, s));
      }
  }
}

TEST_CASE("bottleneck distance") {
  CHECK(bottleneck_distance(bars({{0, 2}}), bars({{0, 2.5}})) == doctest::Approx(0.5));
  const Barcode b = bars({{0, 1}, {0.5, 3}, {1, kInf}});
  CHECK(bottleneck_distance(b, b) == 0.0);
  CHECK(bottleneck_distance(bars({{0, kInf}}), bars({})) == kInf);
  CHECK(bottleneck_distance(bars({{0, 1}}), bars({})) == doctest::Approx(0.5));

  Rng rng(9, "bottleneck");
  auto random_bars = [&](std::size_t n) {
    Barcode out;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = rng.uniform(0, 4);
      out.add(s, rng.coin() && i % 3 == 0 ? kInf : s + rng.uniform(0.01, 3));
    }
    return out;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const Barcode x = random_bars(1 + rng.below(4));
    const Barcode y = random_bars(1 + rng.below(4));
    const Barcode z = random_bars(1 + rng.below(4));
    const double dxy = bottleneck_distance(x, y);
    CHECK(dxy == brute_bottleneck(x, y));
    CHECK(dxy == bottleneck_distance(y, x));
    const double dyz = bottleneck_distance(y, z), dxz = bottleneck_distance(x, z);
    if (dxy != kInf && dyz != kInf) CHECK(dxz <= dxy + dyz + 1e-12);
  }
}

TEST_CASE("perturbation stays within the bottleneck bound") {
  Rng rng(10, "perturb");
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_filtered_complex(rng, 4, 8);
    CHECK(perturb_actions(c, 0.0, 1).generators().size() == c.size());
    const auto p = perturb_actions(c, 0.1, static_cast<std::uint64_t>(trial));
    const double shift = max_action_shift(c, p);
    CHECK(shift <= 0.1);
    const auto bc = reduce_filtered_complex(c).barcode;
    const auto bp = reduce_filtered_complex(p).barcode;
    const double d = bottleneck_distance(bc, bp);
    CHECK(d <= shift);
    if (bc.total() + bp.total() <= 8) CHECK(d == brute_bottleneck(bc, bp));
  }
}
