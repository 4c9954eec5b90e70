#include "hbar/instances.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hbar {

namespace {

std::vector<std::vector<int>> all_faces(int vertices) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1U << vertices); ++mask) {
    std::vector<int> s;
    for (int v = 0; v < vertices; ++v)
      if (mask & (1U << v)) s.push_back(v);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

bool closed(const std::set<std::vector<int>>& k) {
  for (const auto& s : k) {
    if (s.size() < 2) continue;
    for (std::size_t d = 0; d < s.size(); ++d) {
      auto f = s;
      f.erase(f.begin() + static_cast<long>(d));
      if (!k.count(f)) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<SimplicialComplex> tetrahedron_subcomplexes(std::size_t max_simplices) {
  const auto faces = all_faces(4);  // 15 simplices, sorted by dimension
  std::vector<SimplicialComplex> out;
  for (unsigned mask = 1; mask < (1U << faces.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_simplices) continue;
    std::set<std::vector<int>> k;
    for (std::size_t i = 0; i < faces.size(); ++i)
      if (mask & (1U << i)) k.insert(faces[i]);
    if (!closed(k)) continue;
    SimplicialComplex sc;
    for (std::size_t i = 0; i < faces.size(); ++i)
      if (mask & (1U << i)) sc.simplices.push_back(faces[i]);
    out.push_back(std::move(sc));
  }
  return out;
}

FilteredComplexF2 random_filtered_complex(Rng& rng, int vertices, std::size_t max_generators) {
  const auto faces = all_faces(vertices);
  std::set<std::vector<int>> chosen;
  std::vector<std::vector<int>> order;
  // Grow by adding random simplices whose faces are present.
  const std::size_t target = 1 + rng.below(max_generators);
  for (int attempt = 0; attempt < 2000 && order.size() < target; ++attempt) {
    const auto& s = faces[rng.below(faces.size())];
    if (chosen.count(s)) continue;
    bool ok = true;
    for (std::size_t d = 0; d < s.size() && s.size() > 1; ++d) {
      auto f = s;
      f.erase(f.begin() + static_cast<long>(d));
      if (!chosen.count(f)) ok = false;
    }
    if (!ok) continue;
    chosen.insert(s);
    order.push_back(s);
  }
  std::map<std::vector<int>, int> index;
  std::vector<Generator> gens;
  std::vector<Chain> bd;
  for (const auto& s : order) {
    Chain faces_of;
    double a = 0.0;
    for (std::size_t d = 0; d < s.size() && s.size() > 1; ++d) {
      auto f = s;
      f.erase(f.begin() + static_cast<long>(d));
      const int fi = index.at(f);
      faces_of.push_back(fi);
      a = std::max(a, gens[fi].action);
    }
    if (rng.below(3) != 0) a += 0.25 * static_cast<double>(1 + rng.below(12));
    std::string id;
    for (int v : s) id += (id.empty() ? "" : "-") + std::to_string(v);
    index[s] = static_cast<int>(gens.size());
    gens.push_back(Generator{id, a, static_cast<int>(s.size()) - 1});
    bd.push_back(std::move(faces_of));
  }
  return FilteredComplexF2(std::move(gens), std::move(bd));
}

FilteredComplexF2 sphere_morse_complex() {
  // Equator 0..3, poles 4 (local max) and 5 (global max).
  SimplicialComplex k;
  for (int v = 0; v < 6; ++v) k.simplices.push_back({v});
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    k.simplices.push_back({std::min(i, j), std::max(i, j)});
    k.simplices.push_back({i, 4});
    k.simplices.push_back({i, 5});
  }
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    k.simplices.push_back({std::min(i, j), std::max(i, j), 4});
    k.simplices.push_back({std::min(i, j), std::max(i, j), 5});
  }
  // Minimum at vertex 0, saddle at vertex 2 (two lower arcs on the equator).
  return sublevel_filtration(k, {0.0, 0.5, 1.0, 0.6, 2.0, 3.0});
}

FilteredComplexF2 circle_complex() {
  SimplicialComplex k{{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}}};
  return sublevel_filtration(k, {0.0, 1.0, 0.5});
}

}  // namespace hbar
