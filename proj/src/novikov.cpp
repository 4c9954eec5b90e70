#include "hbar/novikov.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>

#include "hbar/barcode.hpp"
#include "hbar/f2.hpp"

namespace hbar {

namespace {

/// Sorts and cancels equal exponents in pairs.
std::vector<double> cancel_pairs(std::vector<double> e) {
  std::sort(e.begin(), e.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < e.size();) {
    std::size_t j = i;
    while (j < e.size() && e[j] == e[i]) ++j;
    if ((j - i) % 2 == 1) out.push_back(e[i]);
    i = j;
  }
  return out;
}

}  // namespace

NovikovScalar::NovikovScalar(std::vector<double> exponents) : e_(cancel_pairs(std::move(exponents))) {
  for (double a : e_)
    if (!std::isfinite(a)) throw Error("NovikovScalar: exponents must be finite");
}

NovikovScalar NovikovScalar::shifted(double a) const {
  NovikovScalar out = *this;
  for (double& x : out.e_) x += a;
  return out;
}

NovikovScalar NovikovScalar::truncated(double cut) const {
  NovikovScalar out;
  for (double x : e_)
    if (x < cut) out.e_.push_back(x);
  return out;
}

NovikovScalar& NovikovScalar::operator+=(const NovikovScalar& o) {
  std::vector<double> out;
  out.reserve(e_.size() + o.e_.size());
  std::set_symmetric_difference(e_.begin(), e_.end(), o.e_.begin(), o.e_.end(),
                                std::back_inserter(out));
  e_ = std::move(out);
  return *this;
}

NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.e_.size() == 1) return b.shifted(a.e_[0]);
  if (b.e_.size() == 1) return a.shifted(b.e_[0]);
  std::vector<double> s;
  s.reserve(a.e_.size() * b.e_.size());
  for (double x : a.e_)
    for (double y : b.e_) s.push_back(x + y);
  NovikovScalar out;
  out.e_ = cancel_pairs(std::move(s));
  return out;
}

double novikov_valuation(const NovikovScalar& x) { return x.valuation(); }

NovikovComplex::NovikovComplex(std::vector<NovikovGenerator> gens)
    : gens_(std::move(gens)), d_(gens_.size() * gens_.size()) {}

std::size_t NovikovComplex::term_count() const {
  std::size_t n = 0;
  for (const auto& x : d_) n += x.exponents().size();
  return n;
}

void NovikovComplex::validate() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (double a : entry(i, j).exponents())
        if (!(action(i) - action(j) + a > 0))
          throw Error(fmt::format("differential term T^{} from {} to {} does not decrease action",
                                  format_real(a), gens_[i].id, gens_[j].id));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      NovikovScalar s;
      for (std::size_t j = 0; j < n; ++j)
        if (!entry(i, j).is_zero() && !entry(j, k).is_zero()) s += entry(i, j) * entry(j, k);
      if (!s.is_zero())
        throw Error(fmt::format("d∘d is nonzero from {} to {}", gens_[i].id, gens_[k].id));
    }
}

NovikovChain NovikovComplex::apply_boundary(const NovikovChain& c) const {
  const std::size_t n = size();
  if (c.size() != n) throw Error("apply_boundary: chain length differs from generator count");
  NovikovChain out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i].is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (!entry(i, j).is_zero()) out[j] += c[i] * entry(i, j);
  }
  return out;
}

double chain_action(const NovikovChain& c, const NovikovComplex& cx) {
  double a = -kInf;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c[i].is_zero()) a = std::max(a, cx.action(i) - c[i].valuation());
  if (a == -kInf) throw Error("chain_action: zero chain has no action");
  return a;
}

std::size_t b_eps_unpinned(const UnpinnedBarcode& b, double eps) {
  if (!(eps > 0)) throw Error("b_eps_unpinned: eps must be > 0");
  std::size_t n = b.infinite;
  for (double l : b.lengths)
    if (l > eps) ++n;
  return n;
}

std::string unpinned_to_csv(const UnpinnedBarcode& b) {
  std::string out = "length\n";
  for (double l : b.lengths) out += format_real(l) + "\n";
  for (std::size_t k = 0; k < b.infinite; ++k) out += "inf\n";
  return out;
}

namespace {

/// Fraction-free elimination on the normalized matrix M_rc = λ_cr T^{A_c − A_r},
/// where every generator sits at action 0 and exponents are arrow lengths.
/// Column ops col_j ← u·col_j + T^{w−v} g·col_c scale by units only, so the
/// pivot valuations are the elementary-divisor valuations: the bar lengths.
class Eliminator {
 public:
  Eliminator(const NovikovComplex& c, bool track, double cut)
      : n_(c.size()), track_(track), cut_(cut), m_(n_, NovikovChain(n_)) {
    for (std::size_t col = 0; col < n_; ++col)
      for (std::size_t r = 0; r < n_; ++r)
        m_[col][r] = c.entry(col, r).shifted(c.action(col) - c.action(r)).truncated(cut_);
    if (track_) {
      x_.assign(n_, NovikovChain(n_));
      for (std::size_t col = 0; col < n_; ++col) x_[col][col] = NovikovScalar::monomial(0);
    }
  }

  struct Pivot {
    std::size_t row, col;
    double beta;
    NovikovChain column;  // image of the column chain at pivot time
  };

  void run(PivotRule rule) {
    std::vector<char> row_live(n_, 1), col_live(n_, 1);
    for (;;) {
      double best = kInf;
      std::size_t br = 0, bc = 0;
      for (std::size_t col = 0; col < n_; ++col) {
        if (!col_live[col]) continue;
        for (std::size_t r = 0; r < n_; ++r) {
          if (!row_live[r]) continue;
          const double v = m_[col][r].valuation();
          if (v < best || (rule == PivotRule::Last && v == best && v != kInf)) {
            best = v;
            br = r;
            bc = col;
          }
        }
      }
      if (best == kInf) break;
      const NovikovScalar u = m_[bc][br].shifted(-best);
      for (std::size_t j = 0; j < n_; ++j) {
        if (!col_live[j] || j == bc || m_[j][br].is_zero()) continue;
        const NovikovScalar g = m_[j][br].shifted(-best);  // T^{w−v}·g
        combine(m_[j], u, m_[bc], g);
        if (track_) combine(x_[j], u, x_[bc], g);
      }
      pivots_.push_back({br, bc, best, m_[bc]});
      row_live[br] = 0;
      col_live[bc] = 0;
    }
    for (std::size_t col = 0; col < n_; ++col)
      if (col_live[col]) free_.push_back(col);
  }

  const std::vector<Pivot>& pivots() const { return pivots_; }
  const std::vector<std::size_t>& free_columns() const { return free_; }
  const NovikovChain& chain(std::size_t col) const { return x_[col]; }

 private:
  /// target ← u·target + g·source
  void combine(NovikovChain& target, const NovikovScalar& u, const NovikovChain& source,
               const NovikovScalar& g) const {
    for (std::size_t k = 0; k < target.size(); ++k) {
      NovikovScalar t = target[k].is_zero() ? NovikovScalar() : u * target[k];
      if (!source[k].is_zero()) t += g * source[k];
      target[k] = cut_ == kInf ? std::move(t) : t.truncated(cut_);
    }
  }

  std::size_t n_;
  bool track_;
  double cut_;
  std::vector<NovikovChain> m_;  // columns
  std::vector<NovikovChain> x_;  // column chains, normalized coordinates
  std::vector<Pivot> pivots_;
  std::vector<std::size_t> free_;
};

UnpinnedBarcode barcode_of(const std::vector<Eliminator::Pivot>& pivots, std::size_t n) {
  UnpinnedBarcode b;
  for (const auto& p : pivots) b.lengths.push_back(p.beta);
  std::sort(b.lengths.begin(), b.lengths.end());
  b.infinite = n - 2 * pivots.size();
  return b;
}

/// Residue of a normalized vector: which coordinates attain the valuation.
f2::Vec residue(const NovikovChain& v) {
  double nu = kInf;
  for (const auto& a : v) nu = std::min(nu, a.valuation());
  f2::Vec r(v.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!v[k].is_zero() && v[k].valuation() == nu) r.set(k);
  return r;
}

/// Normalized coordinates (coefficients of T^{A_k} x_k) to original ones.
NovikovChain denormalize(const NovikovChain& v, const NovikovComplex& c) {
  NovikovChain out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k].shifted(c.action(k));
  return out;
}

double exponent_cutoff(const NovikovComplex& c) {
  // Every bar length is a difference of determinantal-divisor valuations,
  // bounded by the sum of per-column maximal arrow lengths.
  double total = 0;
  for (std::size_t col = 0; col < c.size(); ++col) {
    double m = 0;
    for (std::size_t r = 0; r < c.size(); ++r)
      if (!c.entry(col, r).is_zero())
        m = std::max(m, c.entry(col, r).max_exponent() + c.action(col) - c.action(r));
    total += m;
  }
  return total + 1;
}

/// Polynomial over F2 in t, bit k = coefficient of t^k, kept below t^cap.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::size_t words) : w_(words, 0) {}

  bool is_zero() const {
    for (auto x : w_)
      if (x) return false;
    return true;
  }
  /// Lowest degree present; SIZE_MAX for zero.
  std::size_t valuation() const {
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k]) return k * 64 + static_cast<std::size_t>(__builtin_ctzll(w_[k]));
    return SIZE_MAX;
  }
  void set(std::size_t bit) { w_[bit >> 6] ^= std::uint64_t{1} << (bit & 63); }
  /// Division by t^v, exact when v ≤ valuation().
  Poly shifted_down(std::size_t v) const {
    Poly out(w_.size());
    const std::size_t q = v >> 6, r = v & 63;
    for (std::size_t k = q; k < w_.size(); ++k) {
      std::uint64_t x = w_[k] >> r;
      if (r && k + 1 < w_.size()) x |= w_[k + 1] << (64 - r);
      out.w_[k - q] = x;
    }
    return out;
  }
  /// this ← this·a + b·c, truncated to the word capacity.
  void fused(const Poly& a, const Poly& b, const Poly& c) {
    Poly out(w_.size());
    out.add_product(*this, a);
    out.add_product(b, c);
    w_ = std::move(out.w_);
  }

 private:
  void add_product(const Poly& x, const Poly& y) {
    const std::size_t n = w_.size();
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t word = x.w_[k];
      while (word) {
        const std::size_t bit = k * 64 + static_cast<std::size_t>(__builtin_ctzll(word));
        word &= word - 1;
        const std::size_t q = bit >> 6, r = bit & 63;
        for (std::size_t j = 0; j + q < n; ++j) {
          w_[j + q] ^= y.w_[j] << r;
          if (r && j + q + 1 < n) w_[j + q + 1] ^= y.w_[j] >> (64 - r);
        }
      }
    }
  }

  std::vector<std::uint64_t> w_;
};

/// Quantum q = 2^-j such that every normalized exponent is a multiple of q,
/// or nullopt when none with a modest word count exists.
std::optional<double> exponent_quantum(const NovikovComplex& c, double cut) {
  for (int j = 0; j <= 12; ++j) {
    const double q = std::ldexp(1.0, -j);
    if (cut / q > 8192) return std::nullopt;
    bool ok = true;
    for (std::size_t col = 0; col < c.size() && ok; ++col)
      for (std::size_t r = 0; r < c.size() && ok; ++r)
        for (double a : c.entry(col, r).exponents()) {
          const double x = (a + c.action(col) - c.action(r)) / q;
          if (x != std::floor(x)) {
            ok = false;
            break;
          }
        }
    if (ok) return q;
  }
  return std::nullopt;
}

/// Same elimination as Eliminator, over F2[t] modulo t^cap.
std::vector<double> poly_pivots(const NovikovComplex& c, double q, double cut, PivotRule rule) {
  const std::size_t n = c.size();
  const auto cap = static_cast<std::size_t>(std::ceil(cut / q));
  const std::size_t words = cap / 64 + 1;
  std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n, Poly(words)));
  for (std::size_t col = 0; col < n; ++col)
    for (std::size_t r = 0; r < n; ++r)
      for (double a : c.entry(col, r).exponents()) {
        const auto k = static_cast<std::size_t>((a + c.action(col) - c.action(r)) / q);
        if (k < words * 64) m[col][r].set(k);
      }
  std::vector<char> row_live(n, 1), col_live(n, 1);
  std::vector<double> betas;
  for (;;) {
    std::size_t best = SIZE_MAX, br = 0, bc = 0;
    for (std::size_t col = 0; col < n; ++col) {
      if (!col_live[col]) continue;
      for (std::size_t r = 0; r < n; ++r) {
        if (!row_live[r]) continue;
        const std::size_t v = m[col][r].valuation();
        if (v < best || (rule == PivotRule::Last && v == best && v != SIZE_MAX)) {
          best = v;
          br = r;
          bc = col;
        }
      }
    }
    if (best == SIZE_MAX) break;
    const Poly u = m[bc][br].shifted_down(best);
    for (std::size_t j = 0; j < n; ++j) {
      if (!col_live[j] || j == bc || m[j][br].is_zero()) continue;
      const Poly g = m[j][br].shifted_down(best);
      for (std::size_t r = 0; r < n; ++r)
        if (row_live[r]) m[j][r].fused(u, g, m[bc][r]);
    }
    betas.push_back(static_cast<double>(best) * q);
    row_live[br] = 0;
    col_live[bc] = 0;
  }
  return betas;
}

}  // namespace

NovikovSvd orthogonalize(const NovikovComplex& c, PivotRule rule) {
  c.validate();
  const std::size_t n = c.size();
  Eliminator e(c, true, kInf);
  e.run(rule);
  NovikovSvd out;
  out.barcode = barcode_of(e.pivots(), n);

  f2::Echelon all(n), cycles(n);
  for (const auto& p : e.pivots()) {
    all.insert(residue(e.chain(p.col)));
    NovikovChain yhat = p.column;
    for (auto& a : yhat) a = a.shifted(-p.beta);
    const f2::Vec r = residue(yhat);
    if (!cycles.insert(r) || !all.insert(r))
      throw Error("orthogonalize: boundary residues are dependent");
    out.x.push_back(denormalize(e.chain(p.col), c));
    out.y.push_back(c.apply_boundary(out.x.back()));
  }
  for (std::size_t col : e.free_columns()) {
    const f2::Vec r = residue(e.chain(col));
    if (!cycles.insert(r)) continue;
    if (!all.insert(r)) throw Error("orthogonalize: cycle residues are dependent");
    out.z.push_back(denormalize(e.chain(col), c));
  }
  if (all.dim() != n || out.z.size() != out.barcode.infinite)
    throw Error("orthogonalize: basis is incomplete");
  return out;
}

UnpinnedBarcode unpinned_barcode(const NovikovComplex& c, PivotRule rule) {
  c.validate();
  const double cut = exponent_cutoff(c);
  if (const auto q = exponent_quantum(c, cut)) {
    UnpinnedBarcode b;
    b.lengths = poly_pivots(c, *q, cut, rule);
    std::sort(b.lengths.begin(), b.lengths.end());
    b.infinite = c.size() - 2 * b.lengths.size();
    return b;
  }
  return unpinned_barcode_generic(c, rule);
}

UnpinnedBarcode unpinned_barcode_generic(const NovikovComplex& c, PivotRule rule) {
  c.validate();
  Eliminator e(c, false, exponent_cutoff(c));
  e.run(rule);
  return barcode_of(e.pivots(), c.size());
}

FloerGraph floer_graph(const NovikovComplex& c) {
  FloerGraph g{c.generators(), {}};
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      for (double a : c.entry(i, j).exponents())
        g.arrows.push_back({i, j, a, c.action(i) - c.action(j) + a});
  return g;
}

std::vector<std::size_t> isolated_vertices(const FloerGraph& g, double eps) {
  if (!(eps > 0)) throw Error("isolated_vertices: eps must be > 0");
  std::vector<char> ok(g.vertices.size(), 1);
  for (const auto& a : g.arrows)
    if (!(a.length > eps)) ok[a.from] = ok[a.to] = 0;
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < ok.size(); ++v)
    if (ok[v]) out.push_back(v);
  return out;
}

NovikovComplex dual_complex(const NovikovComplex& c) {
  std::vector<NovikovGenerator> gens;
  for (const auto& g : c.generators()) gens.push_back({g.id + "*", -g.action});
  NovikovComplex d(std::move(gens));
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) d.set_entry(j, i, c.entry(i, j));
  return d;
}

NovikovComplex tensor_product(const NovikovComplex& a, const NovikovComplex& b) {
  const std::size_t na = a.size(), nb = b.size();
  std::vector<NovikovGenerator> gens;
  for (const auto& x : a.generators())
    for (const auto& y : b.generators()) gens.push_back({x.id + "|" + y.id, x.action + y.action});
  NovikovComplex t(std::move(gens));
  // ∂(x⊗y) = ∂x⊗y + x⊗∂y; signs vanish in characteristic two.
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t k = 0; k < nb; ++k) {
      for (std::size_t j = 0; j < na; ++j)
        if (!a.entry(i, j).is_zero()) t.add_entry(i * nb + k, j * nb + k, a.entry(i, j));
      for (std::size_t l = 0; l < nb; ++l)
        if (!b.entry(k, l).is_zero()) t.add_entry(i * nb + k, i * nb + l, b.entry(k, l));
    }
  return t;
}

namespace {

double dyadic(Rng& rng, double lo, double hi) {
  const auto steps = static_cast<std::uint64_t>((hi - lo) * 4);
  return lo + 0.25 * static_cast<double>(rng.below(steps + 1));
}

}  // namespace

PlantedComplex random_novikov_complex(Rng& rng, const NovikovRandomSpec& spec) {
  const std::size_t n = spec.generators;
  if (spec.planted > n) throw Error("random_novikov_complex: more planted vertices than generators");
  std::vector<NovikovGenerator> gens;
  for (std::size_t i = 0; i < n; ++i) gens.push_back({fmt::format("g{}", i), dyadic(rng, -4, 4)});
  NovikovComplex c(std::move(gens));

  // The first `planted` positions are planted; pairs never mix the two kinds.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto pair_up = [&](std::size_t lo, std::size_t hi, double min_length) {
    std::vector<std::size_t> pool(order.begin() + static_cast<long>(lo),
                                  order.begin() + static_cast<long>(hi));
    for (std::size_t k = pool.size(); k > 1; --k) std::swap(pool[k - 1], pool[rng.below(k)]);
    for (std::size_t k = 0; k + 1 < pool.size(); k += 2) {
      if (rng.below(4) == 0) continue;  // leave both as cycles
      const std::size_t x = pool[k], y = pool[k + 1];
      const double length = min_length + dyadic(rng, 0.25, 6);
      c.set_entry(x, y, NovikovScalar::monomial(length - c.action(x) + c.action(y)));
    }
  };
  pair_up(0, spec.planted, spec.eps);
  pair_up(spec.planted, n, 0.0);

  // Filtered basis change x_i' = x_i + T^b x_k with gap b − (A_k − A_i) > 0:
  // D' = E^{-1} D E. Every new arrow is an old arrow lengthened by the gap,
  // so touching a planted vertex is safe once the gap exceeds eps.
  for (std::size_t op = 0; op < spec.ops && n >= 2; ++op) {
    const std::size_t i = rng.below(n), k = rng.below(n);
    if (i == k) continue;
    const bool touches = i < spec.planted || k < spec.planted;
    const double gap = (touches ? spec.eps : 0.0) + dyadic(rng, 0.25, 3);
    const NovikovScalar t = NovikovScalar::monomial(c.action(k) - c.action(i) + gap);
    for (std::size_t j = 0; j < n; ++j)
      if (!c.entry(k, j).is_zero()) c.add_entry(i, j, t * c.entry(k, j));
    for (std::size_t r = 0; r < n; ++r)
      if (!c.entry(r, i).is_zero()) c.add_entry(r, k, t * c.entry(r, i));
  }
  PlantedComplex out{std::move(c), {}};
  for (std::size_t i = 0; i < spec.planted; ++i) out.planted.push_back(i);
  return out;
}

NovikovComplex standard_complex(const std::vector<double>& lengths, std::size_t infinite) {
  std::vector<NovikovGenerator> gens;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    gens.push_back({fmt::format("x{}", k), lengths[k]});
    gens.push_back({fmt::format("y{}", k), 0.0});
  }
  for (std::size_t k = 0; k < infinite; ++k) gens.push_back({fmt::format("z{}", k), 0.0});
  NovikovComplex c(std::move(gens));
  for (std::size_t k = 0; k < lengths.size(); ++k)
    c.set_entry(2 * k, 2 * k + 1, NovikovScalar::monomial(0));
  return c;
}

}  // namespace hbar
