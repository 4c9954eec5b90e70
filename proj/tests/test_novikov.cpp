#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hbar/instances.hpp"
#include "hbar/novikov.hpp"

using namespace hbar;

namespace {

NovikovScalar T(std::initializer_list<double> e) { return NovikovScalar(std::vector<double>(e)); }

/// Bar lengths from determinantal divisors: the k-th elementary divisor has
/// valuation d_k − d_{k−1}, d_k = least valuation of a k×k minor.
UnpinnedBarcode minor_barcode(const NovikovComplex& c) {
  const std::size_t n = c.size();
  auto m = [&](std::size_t r, std::size_t col) {
    return c.entry(col, r).shifted(c.action(col) - c.action(r));
  };
  std::vector<double> d{0.0};
  for (std::size_t k = 1; k <= n; ++k) {
    double best = kInf;
    std::vector<std::size_t> rows(k), cols(k);
    // Enumerate k-subsets of rows and columns by bitmask.
    for (unsigned rm = 0; rm < (1U << n); ++rm) {
      if (static_cast<std::size_t>(__builtin_popcount(rm)) != k) continue;
      for (std::size_t i = 0, t = 0; i < n; ++i)
        if (rm & (1U << i)) rows[t++] = i;
      for (unsigned cm = 0; cm < (1U << n); ++cm) {
        if (static_cast<std::size_t>(__builtin_popcount(cm)) != k) continue;
        for (std::size_t i = 0, t = 0; i < n; ++i)
          if (cm & (1U << i)) cols[t++] = i;
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        NovikovScalar det;
        do {
          NovikovScalar term = NovikovScalar::monomial(0);
          for (std::size_t i = 0; i < k && !term.is_zero(); ++i) term = term * m(rows[i], cols[perm[i]]);
          det += term;
        } while (std::next_permutation(perm.begin(), perm.end()));
        best = std::min(best, det.valuation());
      }
    }
    if (best == kInf) break;
    d.push_back(best);
  }
  UnpinnedBarcode b;
  for (std::size_t k = 1; k < d.size(); ++k) b.lengths.push_back(d[k] - d[k - 1]);
  std::sort(b.lengths.begin(), b.lengths.end());
  b.infinite = n - 2 * (d.size() - 1);
  return b;
}

NovikovComplex from_f2(const FilteredComplexF2& f) {
  std::vector<NovikovGenerator> gens;
  for (const auto& g : f.generators()) gens.push_back({g.id, g.action});
  NovikovComplex c(std::move(gens));
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int j : f.boundary(static_cast<int>(i)))
      c.set_entry(i, static_cast<std::size_t>(j), NovikovScalar::monomial(0));
  return c;
}

bool strictly_filtered(const FilteredComplexF2& f) {
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int j : f.boundary(static_cast<int>(i)))
      if (!(f.action(j) < f.action(static_cast<int>(i)))) return false;
  return true;
}

UnpinnedBarcode tensor_law(const UnpinnedBarcode& a, const UnpinnedBarcode& b) {
  UnpinnedBarcode out;
  for (double x : a.lengths) {
    for (double y : b.lengths) out.lengths.insert(out.lengths.end(), 2, std::min(x, y));
    out.lengths.insert(out.lengths.end(), b.infinite, x);
  }
  for (double y : b.lengths) out.lengths.insert(out.lengths.end(), a.infinite, y);
  out.infinite = a.infinite * b.infinite;
  std::sort(out.lengths.begin(), out.lengths.end());
  return out;
}

}  // namespace

TEST_CASE("novikov scalar arithmetic") {
  CHECK(novikov_valuation(T({2, 5})) == 2);
  CHECK(novikov_valuation(NovikovScalar()) == kInf);
  CHECK(novikov_valuation(T({1, 3}) * T({2})) == 3);
  CHECK((T({1, 2}) + T({2, 3})) == T({1, 3}));
  CHECK((T({0, 1}) * T({0, 1})) == T({0, 2}));
  CHECK(T({1, 1}).is_zero());
}

TEST_CASE("chain action") {
  NovikovComplex c({{"x", 4}, {"y", 7}});
  CHECK(chain_action({T({1}), {}}, c) == 3);
  CHECK(chain_action({T({0}), T({0})}, c) == 7);
  CHECK_THROWS_AS(chain_action({{}, {}}, c), Error);
  Rng rng(1, "chain-action");
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_novikov_complex(rng, {6, 6, 0, 1.0});
    NovikovChain ch(6);
    for (auto& a : ch)
      if (rng.coin()) a = NovikovScalar::monomial(0.25 * static_cast<double>(rng.below(8)));
    if (std::all_of(ch.begin(), ch.end(), [](const auto& a) { return a.is_zero(); })) continue;
    const NovikovChain d = p.complex.apply_boundary(ch);
    if (std::any_of(d.begin(), d.end(), [](const auto& a) { return !a.is_zero(); }))
      CHECK(chain_action(d, p.complex) < chain_action(ch, p.complex));
    NovikovChain shifted = ch;
    for (auto& a : shifted) a = a.shifted(1.5);
    CHECK(chain_action(shifted, p.complex) == chain_action(ch, p.complex) - 1.5);
  }
}

TEST_CASE("hand examples") {
  SUBCASE("diagonal") {
    NovikovComplex c({{"a", 1}, {"b", 0}});
    c.set_entry(0, 1, T({0}));
    const auto svd = orthogonalize(c);
    CHECK(svd.barcode == UnpinnedBarcode{{1}, 0});
    REQUIRE(svd.x.size() == 1);
    CHECK(svd.z.empty());
  }
  SUBCASE("leading term wins") {
    NovikovComplex c({{"a", 3}, {"b", 1}, {"c", 0}});
    c.set_entry(0, 1, T({0}));
    c.set_entry(0, 2, T({2}));
    const auto svd = orthogonalize(c);
    CHECK(svd.barcode == UnpinnedBarcode{{2}, 1});
    CHECK(svd.z.size() == 1);
  }
  SUBCASE("pair of length five") {
    NovikovComplex c({{"a", 5}, {"b", 0}});
    c.set_entry(0, 1, T({0}));
    CHECK(unpinned_barcode(c) == UnpinnedBarcode{{5}, 0});
    const auto d = dual_complex(c);
    CHECK(d.action(0) == -5);
    CHECK(!d.entry(1, 0).is_zero());
    CHECK(unpinned_barcode(d) == UnpinnedBarcode{{5}, 0});
  }
  SUBCASE("zero differential") {
    NovikovComplex c({{"a", 0}, {"b", 1}, {"c", 2}});
    CHECK(unpinned_barcode(c) == UnpinnedBarcode{{}, 3});
    CHECK(orthogonalize(c).z.size() == 3);
    CHECK(floer_graph(c).arrows.empty());
  }
}

TEST_CASE("validation") {
  NovikovComplex up({{"a", 0}, {"b", 3}});
  up.set_entry(0, 1, T({1}));
  CHECK_THROWS_AS(up.validate(), Error);
  NovikovComplex sq({{"a", 2}, {"b", 1}, {"c", 0}});
  sq.set_entry(0, 1, T({0}));
  sq.set_entry(1, 2, T({0}));
  try {
    sq.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find('a') != std::string::npos);
    CHECK(msg.find('c') != std::string::npos);
  }
}

TEST_CASE("unpinned barcode counts") {
  CHECK(b_eps_unpinned({{5}, 1}, 1) == 2);
  CHECK(b_eps_unpinned({{1}, 0}, 1) == 0);
  CHECK_THROWS_AS(b_eps_unpinned({{1}, 0}, 0), Error);
  CHECK(unpinned_to_csv({{2.5}, 1}) == "length\n2.5\ninf\n");
}

TEST_CASE("elimination agrees with determinantal divisors") {
  Rng rng(2, "minors");
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = random_novikov_complex(rng, {2 + rng.below(5), 14, 0, 1.0});
    const auto expect = minor_barcode(p.complex);
    CHECK(unpinned_barcode(p.complex) == expect);
    CHECK(unpinned_barcode(p.complex, PivotRule::Last) == expect);
    CHECK(orthogonalize(p.complex).barcode == expect);
  }
}

TEST_CASE("elimination agrees with the F2 reduction") {
  Rng rng(3, "f2");
  int used = 0;
  for (int trial = 0; trial < 400 && used < 80; ++trial) {
    const auto f = random_filtered_complex(rng, 5, 16);
    if (!strictly_filtered(f)) continue;
    ++used;
    const auto bc = reduce_filtered_complex(f).barcode;
    UnpinnedBarcode expect;
    for (const auto& b : bc.bars()) {
      if (b.infinite()) expect.infinite += b.multiplicity;
      else expect.lengths.insert(expect.lengths.end(), b.multiplicity, b.length());
    }
    std::sort(expect.lengths.begin(), expect.lengths.end());
    CHECK(unpinned_barcode(from_f2(f)) == expect);
  }
  CHECK(used >= 20);
}

TEST_CASE("singular value decomposition is orthogonal") {
  Rng rng(4, "svd");
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_novikov_complex(rng, {3 + rng.below(6), 24, 0, 1.0});
    const auto& c = p.complex;
    const auto svd = orthogonalize(c, trial % 2 ? PivotRule::Last : PivotRule::First);
    std::vector<double> lengths;
    for (std::size_t i = 0; i < svd.x.size(); ++i) {
      CHECK(c.apply_boundary(svd.x[i]) == svd.y[i]);
      lengths.push_back(chain_action(svd.x[i], c) - chain_action(svd.y[i], c));
    }
    std::sort(lengths.begin(), lengths.end());
    CHECK(lengths == svd.barcode.lengths);
    for (const auto& z : svd.z)
      for (const auto& a : c.apply_boundary(z)) CHECK(a.is_zero());
    // A(Σ a_v v) = max A(a_v v) for random monomial coefficients.
    std::vector<NovikovChain> basis = svd.x;
    basis.insert(basis.end(), svd.y.begin(), svd.y.end());
    basis.insert(basis.end(), svd.z.begin(), svd.z.end());
    REQUIRE(basis.size() == c.size());
    for (int combo = 0; combo < 20; ++combo) {
      NovikovChain sum(c.size());
      double expect = -kInf;
      for (const auto& v : basis) {
        if (!rng.coin()) continue;
        const auto a = NovikovScalar::monomial(0.25 * static_cast<double>(rng.below(12)) - 1.5);
        for (std::size_t k = 0; k < v.size(); ++k)
          if (!v[k].is_zero()) sum[k] += a * v[k];
        expect = std::max(expect, chain_action(v, c) - a.valuation());
      }
      if (expect == -kInf) continue;
      CHECK(chain_action(sum, c) == expect);
    }
  }
}

TEST_CASE("floer graph and isolated vertices") {
  NovikovComplex c({{"a", 1}, {"b", 0}});
  c.set_entry(0, 1, T({2}));
  const auto g = floer_graph(c);
  REQUIRE(g.arrows.size() == 1);
  CHECK(g.arrows[0].length == 3);
  NovikovComplex five({{"a", 5}, {"b", 0}});
  five.set_entry(0, 1, T({0}));
  CHECK(isolated_vertices(floer_graph(five), 1).size() == 2);
  CHECK(b_eps_unpinned(unpinned_barcode(five), 1) == 1);
  CHECK(isolated_vertices(floer_graph(five), 5).empty());

  Rng rng(5, "isolated");
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_novikov_complex(rng, {12, 36, 1 + rng.below(8), 1.0});
    const auto graph = floer_graph(p.complex);
    CHECK(graph.arrows.size() == p.complex.term_count());
    const auto iso = isolated_vertices(graph, 1.0);
    for (auto v : p.planted) CHECK(std::find(iso.begin(), iso.end(), v) != iso.end());
    CHECK(2 * b_eps_unpinned(unpinned_barcode(p.complex), 1.0) >= iso.size());
    CHECK(b_eps_unpinned(unpinned_barcode(p.complex), 1.0) <= p.complex.size());
  }
}

TEST_CASE("duality preserves the barcode") {
  Rng rng(6, "dual");
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_novikov_complex(rng, {2 + rng.below(10), 30, 0, 1.0});
    const auto b = unpinned_barcode(p.complex);
    CHECK(unpinned_barcode(dual_complex(p.complex)) == b);
    CHECK(unpinned_barcode(dual_complex(dual_complex(p.complex))) == b);
  }
}

TEST_CASE("tensor product follows the pairing law") {
  CHECK(unpinned_barcode(tensor_product(standard_complex({3}, 0), standard_complex({5}, 0))) ==
        UnpinnedBarcode{{3, 3}, 0});
  CHECK(unpinned_barcode(tensor_product(standard_complex({}, 1), standard_complex({5}, 0))) ==
        UnpinnedBarcode{{5}, 0});
  Rng rng(7, "tensor");
  for (int trial = 0; trial < 15; ++trial) {
    const auto a = random_novikov_complex(rng, {2 + rng.below(5), 14, 0, 1.0}).complex;
    const auto b = random_novikov_complex(rng, {2 + rng.below(5), 14, 0, 1.0}).complex;
    const auto ba = unpinned_barcode(a), bb = unpinned_barcode(b);
    const auto t = tensor_product(a, b);
    t.validate();
    CHECK(unpinned_barcode(t) == tensor_law(ba, bb));
    for (double eps : {0.5, 1.0, 2.0})
      CHECK(b_eps_unpinned(unpinned_barcode(t), eps) <=
            2 * b_eps_unpinned(ba, eps) * b_eps_unpinned(bb, eps));
  }
}

TEST_CASE("packed and generic elimination agree") {
  Rng rng(8, "paths");
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_novikov_complex(rng, {2 + rng.below(9), 24, 0, 1.0});
    CHECK(unpinned_barcode(p.complex) == unpinned_barcode_generic(p.complex));
  }
  NovikovComplex c({{"a", std::sqrt(2.0)}, {"b", 0}, {"c", -0.1}});
  c.set_entry(0, 1, T({0}));
  c.set_entry(0, 2, T({0.3}));
  const auto b = unpinned_barcode(c);
  CHECK(b == unpinned_barcode_generic(c));
  CHECK(b.lengths == std::vector<double>{std::sqrt(2.0)});
}
