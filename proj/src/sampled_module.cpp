#include "hbar/sampled_module.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace hbar {

SampledModule::SampledModule(std::vector<double> grid, std::vector<std::size_t> dims,
                             std::vector<f2::Matrix> maps)
    : grid_(std::move(grid)), dims_(std::move(dims)), maps_(std::move(maps)) {
  if (grid_.empty()) throw Error("SampledModule: empty grid");
  if (!std::is_sorted(grid_.begin(), grid_.end()) ||
      std::adjacent_find(grid_.begin(), grid_.end()) != grid_.end())
    throw Error("SampledModule: grid must be strictly increasing");
  if (dims_.size() != grid_.size() || maps_.size() + 1 != grid_.size())
    throw Error("SampledModule: grid, dims, maps sizes disagree");
  for (std::size_t i = 0; i < maps_.size(); ++i)
    if (maps_[i].rows != dims_[i + 1] || maps_[i].domain_dim() != dims_[i])
      throw Error(fmt::format("SampledModule: map {} has wrong shape", i));
}

f2::Matrix SampledModule::map(std::size_t i, std::size_t j) const {
  if (j < i || j >= grid_.size()) throw Error("SampledModule::map: bad grid indices");
  f2::Matrix m = f2::Matrix::identity(dims_[i]);
  for (std::size_t k = i; k < j; ++k) m = f2::compose(maps_[k], m);
  return m;
}

std::size_t SampledModule::cell_below(double x) const {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end()) throw Error(fmt::format("point {} lies above the grid", format_real(x)));
  return static_cast<std::size_t>(it - grid_.begin());
}

std::size_t SampledModule::cell_above(double x) const {
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end()) throw Error(fmt::format("point {} lies above the grid", format_real(x)));
  return static_cast<std::size_t>(it - grid_.begin());
}

namespace {

f2::Vec chain_vec(const Chain& c, std::size_t n) {
  f2::Vec v(n);
  for (int i : c) v.set(static_cast<std::size_t>(i));
  return v;
}

/// Homology of the subcomplex {action < t}: representatives of a basis and
/// an echelon form that reads off coordinates of any cycle.
struct Homology {
  std::vector<f2::Vec> reps;
  f2::Echelon coords{0};
};

Homology sublevel_homology(const FilteredComplexF2& c, double t) {
  const std::size_t n = c.size();
  f2::Matrix d{n, {}};
  std::vector<int> members;
  for (std::size_t i = 0; i < n; ++i)
    if (c.action(static_cast<int>(i)) < t) members.push_back(static_cast<int>(i));
  for (int i : members) d.cols.push_back(chain_vec(c.boundary(i), n));
  std::vector<f2::Vec> cycles;
  for (const auto& k : f2::kernel(d)) {
    f2::Vec z(n);
    for (std::size_t j = 0; j < members.size(); ++j)
      if (k.get(j)) z.set(static_cast<std::size_t>(members[j]));
    cycles.push_back(std::move(z));
  }
  f2::Echelon boundaries(n);
  for (const auto& col : d.cols) boundaries.insert(col);
  Homology h;
  f2::Echelon span = boundaries;
  for (const auto& z : cycles)
    if (span.insert(z)) h.reps.push_back(z);
  h.coords = f2::Echelon(n, h.reps.size());
  for (const auto& b : boundaries.rows()) h.coords.insert(b);
  for (std::size_t k = 0; k < h.reps.size(); ++k) {
    f2::Vec tag(h.reps.size());
    tag.set(k);
    h.coords.insert(h.reps[k], tag);
  }
  return h;
}

f2::Vec coordinates(const Homology& h, f2::Vec cycle) {
  f2::Vec tag = h.coords.reduce(cycle);
  if (cycle.any()) throw Error("sampled module: representative is not a cycle of the target");
  return tag;
}

f2::Matrix induced_map(const Homology& from, const Homology& to) {
  f2::Matrix m{to.reps.size(), {}};
  for (const auto& r : from.reps) m.cols.push_back(coordinates(to, r));
  return m;
}

std::vector<double> default_grid(const FilteredComplexF2& c) {
  std::vector<double> a;
  for (const auto& g : c.generators()) a.push_back(g.action);
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::vector<double> grid;
  if (a.empty()) return {0.0};
  grid.push_back(a.front() - 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    grid.push_back(a[i]);
    grid.push_back(i + 1 < a.size() ? 0.5 * (a[i] + a[i + 1]) : a[i] + 1.0);
  }
  return grid;
}

}  // namespace

SampledModule sample_module(const FilteredComplexF2& c) { return sample_module(c, default_grid(c)); }

SampledModule sample_module(const FilteredComplexF2& c, std::vector<double> grid) {
  c.validate();
  std::vector<Homology> hs;
  for (double t : grid) hs.push_back(sublevel_homology(c, t));
  std::vector<std::size_t> dims;
  for (const auto& h : hs) dims.push_back(h.reps.size());
  std::vector<f2::Matrix> maps;
  for (std::size_t i = 0; i + 1 < hs.size(); ++i) maps.push_back(induced_map(hs[i], hs[i + 1]));
  return SampledModule(std::move(grid), std::move(dims), std::move(maps));
}

f2::Matrix direct_structure_map(const FilteredComplexF2& c, const std::vector<double>& grid,
                                std::size_t i, std::size_t j) {
  return induced_map(sublevel_homology(c, grid.at(i)), sublevel_homology(c, grid.at(j)));
}

SampledModule interval_module(double a, double b, std::vector<double> grid) {
  if (!(a < b)) throw Error("interval_module: need a < b");
  std::vector<std::size_t> dims;
  for (double t : grid) dims.push_back(a < t && t <= b ? 1 : 0);
  std::vector<f2::Matrix> maps;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    f2::Matrix m = f2::Matrix::zero(dims[i + 1], dims[i]);
    if (dims[i] && dims[i + 1]) m.cols[0].set(0);
    maps.push_back(std::move(m));
  }
  return SampledModule(std::move(grid), std::move(dims), std::move(maps));
}

SampledModule direct_sum(const SampledModule& u, const SampledModule& v) {
  if (u.grid() != v.grid()) throw Error("direct_sum: grids differ");
  const std::size_t m = u.grid().size();
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < m; ++i) dims.push_back(u.dim(i) + v.dim(i));
  std::vector<f2::Matrix> maps;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    f2::Matrix s = f2::Matrix::zero(dims[i + 1], dims[i]);
    const auto& a = u.adjacent_map(i);
    const auto& b = v.adjacent_map(i);
    for (std::size_t col = 0; col < a.domain_dim(); ++col)
      for (std::size_t r = 0; r < a.rows; ++r)
        if (a.cols[col].get(r)) s.cols[col].set(r);
    for (std::size_t col = 0; col < b.domain_dim(); ++col)
      for (std::size_t r = 0; r < b.rows; ++r)
        if (b.cols[col].get(r)) s.cols[u.dim(i) + col].set(u.dim(i + 1) + r);
    maps.push_back(std::move(s));
  }
  return SampledModule(u.grid(), std::move(dims), std::move(maps));
}

std::size_t barcode_multiplicity(const SampledModule& m, double a, double b, double c) {
  const auto& g = m.grid();
  if (!(a < c && c < b)) throw Error("barcode_multiplicity: need a < c < b");
  if (a < g.front() || (b != kInf && b >= g.back()))
    throw Error("barcode_multiplicity: interval endpoints outside the grid range");
  auto ci = std::lower_bound(g.begin(), g.end(), c);
  if (ci == g.end() || *ci != c) throw Error("barcode_multiplicity: c must be a grid point");
  const std::size_t ic = static_cast<std::size_t>(ci - g.begin());
  const std::size_t dim_c = m.dim(ic);
  if (dim_c == 0) return 0;

  // α(v) < a  <=> v ∈ im π(cell_below(a), c);  α(v) ≤ a  <=> v ∈ im π(cell_above(a), c)
  // β(v) < b  <=> v ∈ ker π(c, cell_below(b)); β(v) ≤ b  <=> v ∈ ker π(c, cell_above(b))
  auto im = [&](std::size_t from) { return f2::image(m.map(from, ic)); };
  auto ker = [&](std::size_t to) { return f2::kernel(m.map(ic, to)); };
  std::vector<f2::Vec> all;
  for (std::size_t k = 0; k < dim_c; ++k) {
    f2::Vec e(dim_c);
    e.set(k);
    all.push_back(std::move(e));
  }
  const auto im_lt = im(m.cell_below(a));
  const auto im_le = im(m.cell_above(a));
  const auto ker_le = b == kInf ? all : ker(m.cell_above(b));
  const auto ker_lt = b == kInf ? ker(g.size() - 1) : ker(m.cell_below(b));

  const auto A = f2::intersect(im_le, ker_le, dim_c);
  const auto B = f2::intersect(im_lt, ker_le, dim_c);
  const auto C = f2::intersect(im_le, ker_lt, dim_c);
  std::vector<f2::Vec> bc = B;
  bc.insert(bc.end(), C.begin(), C.end());
  return A.size() - f2::rank(bc, dim_c);
}

Barcode barcode_from_multiplicities(const SampledModule& m, const std::vector<double>& endpoints) {
  std::vector<double> e = endpoints;
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  const auto& g = m.grid();
  auto interior_point = [&](double lo, double hi) -> std::optional<double> {
    auto it = std::upper_bound(g.begin(), g.end(), lo);
    if (it != g.end() && *it < hi) return *it;
    return std::nullopt;
  };
  std::vector<Bar> bars;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j <= e.size(); ++j) {
      const double a = e[i];
      const double b = j < e.size() ? e[j] : kInf;
      auto c = interior_point(a, b);
      if (!c) continue;
      const std::size_t n = barcode_multiplicity(m, a, b, *c);
      if (n > 0) bars.push_back(Bar{a, b, n, std::nullopt});
    }
  }
  return Barcode(std::move(bars));
}

}  // namespace hbar
