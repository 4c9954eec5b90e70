#include "hbar/filtered_complex.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

namespace hbar {

Chain chain_add(const Chain& a, const Chain& b) {
  Chain out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace {

Chain normalize_chain(Chain c) {
  std::sort(c.begin(), c.end());
  Chain out;
  for (std::size_t i = 0; i < c.size();) {
    std::size_t j = i;
    while (j < c.size() && c[j] == c[i]) ++j;
    if ((j - i) % 2 == 1) out.push_back(c[i]);
    i = j;
  }
  return out;
}

}  // namespace

FilteredComplexF2::FilteredComplexF2(std::vector<Generator> gens, std::vector<Chain> boundary)
    : gens_(std::move(gens)), boundary_(std::move(boundary)) {
  if (boundary_.size() != gens_.size()) throw Error("FilteredComplexF2: boundary/generator count mismatch");
  for (auto& b : boundary_) {
    b = normalize_chain(std::move(b));
    for (int j : b)
      if (j < 0 || j >= static_cast<int>(gens_.size()))
        throw Error(fmt::format("FilteredComplexF2: boundary index {} out of range", j));
  }
}

int FilteredComplexF2::add(Generator g, Chain boundary) {
  boundary = normalize_chain(std::move(boundary));
  gens_.push_back(std::move(g));
  boundary_.push_back(std::move(boundary));
  return static_cast<int>(gens_.size()) - 1;
}

double FilteredComplexF2::chain_action(const Chain& c) const {
  double a = -kInf;
  for (int i : c) a = std::max(a, gens_[i].action);
  return a;
}

Chain FilteredComplexF2::apply_boundary(const Chain& c) const {
  Chain out;
  for (int i : c) out = chain_add(out, boundary_[i]);
  return out;
}

void FilteredComplexF2::validate() const {
  const int n = static_cast<int>(gens_.size());
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(gens_[i].action))
      throw Error(fmt::format("generator '{}': action must be finite", gens_[i].id));
    for (int j : boundary_[i]) {
      if (j < 0 || j >= n) throw Error(fmt::format("generator '{}': boundary index out of range", gens_[i].id));
      if (gens_[j].action > gens_[i].action)
        throw Error(fmt::format(
            "generator '{}': filtration not monotone, boundary term '{}' has action {} > {}",
            gens_[i].id, gens_[j].id, format_real(gens_[j].action), format_real(gens_[i].action)));
    }
  }
  for (int i = 0; i < n; ++i) {
    const Chain dd = apply_boundary(boundary_[i]);
    if (!dd.empty())
      throw Error(fmt::format("generator '{}': boundary of boundary is nonzero (contains '{}')",
                              gens_[i].id, gens_[dd.front()].id));
  }
}

std::vector<int> filtration_order(const FilteredComplexF2& c) {
  const int n = static_cast<int>(c.size());
  std::vector<int> by_action(n);
  for (int i = 0; i < n; ++i) by_action[i] = i;
  std::stable_sort(by_action.begin(), by_action.end(),
                   [&](int a, int b) { return c.action(a) < c.action(b); });
  std::vector<int> order;
  order.reserve(n);
  // Within a block of equal actions, place faces first (Kahn, min index first).
  for (std::size_t lo = 0; lo < by_action.size();) {
    std::size_t hi = lo;
    while (hi < by_action.size() && c.action(by_action[hi]) == c.action(by_action[lo])) ++hi;
    std::map<int, int> indeg;
    std::map<int, std::vector<int>> cofaces;
    for (std::size_t k = lo; k < hi; ++k) indeg[by_action[k]] = 0;
    for (std::size_t k = lo; k < hi; ++k) {
      const int v = by_action[k];
      for (int f : c.boundary(v))
        if (indeg.count(f)) {
          ++indeg[v];
          cofaces[f].push_back(v);
        }
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (auto [v, d] : indeg)
      if (d == 0) ready.push(v);
    std::size_t placed = 0;
    while (!ready.empty()) {
      const int v = ready.top();
      ready.pop();
      order.push_back(v);
      ++placed;
      for (int w : cofaces[v])
        if (--indeg[w] == 0) ready.push(w);
    }
    if (placed != hi - lo)
      throw Error(fmt::format("boundary relation is cyclic among generators of action {}",
                              format_real(c.action(by_action[lo]))));
    lo = hi;
  }
  return order;
}

Reduction reduce_filtered_complex(const FilteredComplexF2& c) {
  c.validate();
  const int n = static_cast<int>(c.size());
  Reduction out;
  out.order = filtration_order(c);
  std::vector<int> pos(n);
  for (int p = 0; p < n; ++p) pos[out.order[p]] = p;

  // Columns in position space; low = largest position.
  std::vector<Chain> r(n), v(n);
  for (int p = 0; p < n; ++p) {
    for (int g : c.boundary(out.order[p])) r[p].push_back(pos[g]);
    std::sort(r[p].begin(), r[p].end());
    v[p] = {p};
  }
  std::vector<int> pivot_of_row(n, -1);
  for (int p = 0; p < n; ++p) {
    while (!r[p].empty()) {
      const int low = r[p].back();
      const int q = pivot_of_row[low];
      if (q < 0) break;
      r[p] = chain_add(r[p], r[q]);
      v[p] = chain_add(v[p], v[q]);
    }
    if (!r[p].empty()) pivot_of_row[r[p].back()] = p;
  }

  auto to_gens = [&](const Chain& positions) {
    Chain g;
    for (int q : positions) g.push_back(out.order[q]);
    std::sort(g.begin(), g.end());
    return g;
  };
  std::vector<Bar> bars;
  for (int p = 0; p < n; ++p) {
    if (!r[p].empty()) {
      const int birth = out.order[r[p].back()];
      const int death = out.order[p];
      out.pairs.push_back({birth, death});
      out.x.push_back(to_gens(v[p]));
      out.y.push_back(to_gens(r[p]));
      const double a = c.action(birth), b = c.action(death);
      if (a < b) bars.push_back(Bar{a, b, 1, c.generator(birth).degree});
    } else if (pivot_of_row[p] < 0) {
      const int g = out.order[p];
      out.essential.push_back(g);
      out.z.push_back(to_gens(v[p]));
      bars.push_back(Bar{c.action(g), kInf, 1, c.generator(g).degree});
    }
  }
  out.barcode = Barcode(std::move(bars));
  return out;
}

FilteredComplexF2 sublevel_filtration(const SimplicialComplex& k,
                                      const std::vector<double>& vertex_values) {
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < k.simplices.size(); ++i) {
    std::vector<int> s = k.simplices[i];
    std::sort(s.begin(), s.end());
    if (s.empty()) throw Error(fmt::format("simplex #{} is empty", i));
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(fmt::format("simplex #{} repeats a vertex", i));
    for (int v : s)
      if (v < 0 || v >= static_cast<int>(vertex_values.size()))
        throw Error(fmt::format("simplex #{} uses vertex {} without a value", i, v));
    if (!index.emplace(s, static_cast<int>(i)).second)
      throw Error(fmt::format("simplex #{} is listed twice", i));
  }
  for (double x : vertex_values)
    if (!std::isfinite(x)) throw Error("sublevel_filtration: vertex values must be finite");

  std::vector<Generator> gens;
  std::vector<Chain> bd;
  for (std::size_t i = 0; i < k.simplices.size(); ++i) {
    std::vector<int> s = k.simplices[i];
    std::sort(s.begin(), s.end());
    double value = -kInf;
    std::string id;
    for (int v : s) {
      value = std::max(value, vertex_values[v]);
      id += (id.empty() ? "" : "-") + std::to_string(v);
    }
    Chain faces;
    if (s.size() > 1) {
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        std::vector<int> f;
        for (std::size_t j = 0; j < s.size(); ++j)
          if (j != drop) f.push_back(s[j]);
        auto it = index.find(f);
        if (it == index.end())
          throw Error(fmt::format("simplex {} is missing its face (not closed under faces)", id));
        faces.push_back(it->second);
      }
    }
    gens.push_back(Generator{id, value, static_cast<int>(s.size()) - 1});
    bd.push_back(std::move(faces));
  }
  FilteredComplexF2 out(std::move(gens), std::move(bd));
  return out;
}

FilteredComplexF2 perturb_actions(const FilteredComplexF2& c, double bound, std::uint64_t seed) {
  if (!(bound >= 0)) throw Error("perturb_actions: bound must be >= 0");
  FilteredComplexF2 out = c;
  if (bound == 0) return out;
  const int n = static_cast<int>(c.size());
  Rng rng(seed, "perturb_actions");
  for (int i = 0; i < n; ++i) out.set_action(i, c.action(i) + rng.uniform(-bound, bound));
  for (int round = 0; round < 1000; ++round) {
    std::set<int> bad;
    for (int i = 0; i < n; ++i)
      for (int j : c.boundary(i))
        if (out.action(j) > out.action(i)) {
          bad.insert(i);
          bad.insert(j);
        }
    if (bad.empty()) return out;
    for (int i : bad) out.set_action(i, c.action(i) + rng.uniform(-bound, bound));
  }
  throw Error(fmt::format("perturb_actions: bound {} breaks filtration monotonicity beyond repair",
                          format_real(bound)));
}

double max_action_shift(const FilteredComplexF2& a, const FilteredComplexF2& b) {
  if (a.size() != b.size()) throw Error("max_action_shift: generator count mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.action(static_cast<int>(i)) - b.action(static_cast<int>(i))));
  return m;
}

}  // namespace hbar
