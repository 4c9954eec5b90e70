#include "hbar/toric.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace hbar {

namespace {

void check_interval(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw Error("profile domain must be a finite interval lo < hi");
}

// v·k rounded when within 1e-9 of an integer: ties are decided exactly.
double snap(double v, int k) {
  const double q = v * k;
  const double r = std::round(q);
  return std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q)) ? r : q;
}

// #{p : lo < p/k < hi} and #{p : lo ≤ p/k ≤ hi}.
std::pair<std::size_t, std::size_t> lattice_in(double lo, double hi, int k) {
  const double a = snap(lo, k), b = snap(hi, k);
  const double open = std::ceil(b) - 1 - (std::floor(a) + 1) + 1;
  const double closed = std::floor(b) - std::ceil(a) + 1;
  return {static_cast<std::size_t>(std::max(0.0, open)), static_cast<std::size_t>(std::max(0.0, closed))};
}

// Root of a nondecreasing f on [a, b] with f(a) < target < f(b).
double monotone_root(const std::function<double(double)>& f, double a, double b, double target) {
  for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    (f(m) < target ? a : b) = m;
  }
  return 0.5 * (a + b);
}

FaceCount edge_face(std::string name, const std::function<double(double)>& slope, double a, double b, int k,
                    const std::function<P2(double)>& embed) {
  FaceCount f{std::move(name), 1, 0, 0, {}};
  const double lo = slope(a), hi = slope(b);
  if (hi < lo - 1e-12) throw Error(fmt::format("profile is not convex along face {}", f.face));
  const auto [open, closed] = lattice_in(lo, hi, k);
  f.count = open;
  f.closed = closed;
  const double a_p = snap(lo, k);
  for (std::size_t j = 0; j < open; ++j) {
    const double p = std::floor(a_p) + 1 + static_cast<double>(j);
    f.points.push_back(embed(monotone_root(slope, a, b, p / k)));
  }
  return f;
}

FaceCount vertex_face(std::string name, P2 w) { return FaceCount{std::move(name), 0, 1, 1, {w}}; }

double ipow(double x, int n) {
  double r = 1;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Minimizes h(w) − g·w over the rectangle by projected Newton steps.
P2 minimize_tilted(const ConvexProfile& h, const P2& g) {
  const auto& d = h.domain;
  P2 w{0.5 * (d[0] + d[1]), 0.5 * (d[2] + d[3])};
  auto clamp = [&](P2 v) { return P2{std::clamp(v[0], d[0], d[1]), std::clamp(v[1], d[2], d[3])}; };
  auto phi = [&](const P2& v) { return h.h(v) - g[0] * v[0] - g[1] * v[1]; };
  for (int it = 0; it < 100; ++it) {
    const P2 gr = h.grad(w);
    const P2 G{gr[0] - g[0], gr[1] - g[1]};
    const auto H = h.hess(w);
    // Variables held at a bound whose gradient pushes outward stay fixed.
    const bool fx = (w[0] <= d[0] && G[0] > 0) || (w[0] >= d[1] && G[0] < 0);
    const bool fy = (w[1] <= d[2] && G[1] > 0) || (w[1] >= d[3] && G[1] < 0);
    const double reg = 1e-12;
    P2 step{0.0, 0.0};
    if (!fx && !fy) {
      const double a = H[0] + reg, b = H[1], c = H[2] + reg;
      const double det = a * c - b * b;
      if (det > 0) step = {-(c * G[0] - b * G[1]) / det, -(a * G[1] - b * G[0]) / det};
      else step = {-G[0], -G[1]};
    } else if (!fx) {
      step[0] = -G[0] / std::max(H[0], reg);
    } else if (!fy) {
      step[1] = -G[1] / std::max(H[2], reg);
    }
    if (step[0] == 0 && step[1] == 0) break;
    double t = 1;
    const double f0 = phi(w);
    P2 next = clamp({w[0] + step[0], w[1] + step[1]});
    while (phi(next) > f0 && t > 1e-12) {
      t *= 0.5;
      next = clamp({w[0] + t * step[0], w[1] + t * step[1]});
    }
    const double moved = std::hypot(next[0] - w[0], next[1] - w[1]);
    w = next;
    if (moved < 1e-15) break;
  }
  return w;
}

}  // namespace

void ConvexProfile::check_convex() const {
  const int n = 1000;
  const double tol = 1e-9;
  if (dim == 1) {
    for (int i = 0; i <= n; ++i) {
      const double x = domain[0] + (domain[1] - domain[0]) * i / n;
      const double hx = hess({x, 0.0})[0];
      if (!(hx >= -tol)) throw Error(fmt::format("profile {} is not convex: h'' = {} at x = {}", name, hx, x));
    }
    return;
  }
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const P2 w{domain[0] + (domain[1] - domain[0]) * i / n, domain[2] + (domain[3] - domain[2]) * j / n};
      const auto H = hess(w);
      if (!(H[0] >= -tol && H[2] >= -tol && H[0] * H[2] - H[1] * H[1] >= -tol))
        throw Error(fmt::format("profile {} is not convex: Hessian not positive semidefinite at ({}, {})", name,
                                w[0], w[1]));
    }
}

ConvexProfile power_profile(double c, double p, double lo, double hi) {
  check_interval(lo, hi);
  if (!(c >= 0) || !(p >= 1)) throw Error("power profile needs c >= 0 and p >= 1");
  if (lo < 0) throw Error("power profile domain must lie in [0, inf)");
  ConvexProfile h;
  h.name = fmt::format("power(c={}, p={})", format_real(c), format_real(p));
  h.domain = {lo, hi, 0.0, 0.0};
  h.h = [c, p](const P2& w) { return c * std::pow(w[0], p); };
  h.grad = [c, p](const P2& w) { return P2{p == 1 ? c : c * p * std::pow(w[0], p - 1), 0.0}; };
  h.hess = [c, p](const P2& w) {
    const double v = p == 1 ? 0.0 : p == 2 ? 2 * c : c * p * (p - 1) * std::pow(w[0], p - 2);
    return std::array<double, 3>{v, 0.0, 0.0};
  };
  return h;
}

ConvexProfile poly_profile(std::vector<double> coeffs, double lo, double hi) {
  check_interval(lo, hi);
  if (coeffs.empty()) throw Error("poly profile needs at least one coefficient");
  ConvexProfile h;
  h.name = fmt::format("poly(degree {})", coeffs.size() - 1);
  h.domain = {lo, hi, 0.0, 0.0};
  h.h = [coeffs](const P2& w) {
    double v = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * w[0] + coeffs[i];
    return v;
  };
  h.grad = [coeffs](const P2& w) {
    double v = 0;
    for (std::size_t i = coeffs.size(); i-- > 1;) v = v * w[0] + static_cast<double>(i) * coeffs[i];
    return P2{v, 0.0};
  };
  h.hess = [coeffs](const P2& w) {
    double v = 0;
    for (std::size_t i = coeffs.size(); i-- > 2;) v = v * w[0] + static_cast<double>(i * (i - 1)) * coeffs[i];
    return std::array<double, 3>{v, 0.0, 0.0};
  };
  h.check_convex();
  return h;
}

ConvexProfile table_profile(std::vector<double> slopes, double lo, double hi) {
  check_interval(lo, hi);
  if (slopes.size() < 2) throw Error("table profile needs at least 2 slope values");
  for (std::size_t i = 1; i < slopes.size(); ++i)
    if (!(slopes[i] >= slopes[i - 1]))
      throw Error(fmt::format("table profile is not convex: slope {} < {} at knot {}", slopes[i], slopes[i - 1], i));
  const double step = (hi - lo) / static_cast<double>(slopes.size() - 1);
  auto locate = [lo, step, n = slopes.size()](double x) {
    const double t = (x - lo) / step;
    const auto j = std::min(static_cast<std::size_t>(std::max(0.0, t)), n - 2);
    return std::pair{j, t - static_cast<double>(j)};
  };
  ConvexProfile h;
  h.name = fmt::format("table({} knots)", slopes.size());
  h.domain = {lo, hi, 0.0, 0.0};
  h.grad = [slopes, locate](const P2& w) {
    const auto [j, u] = locate(w[0]);
    return P2{slopes[j] + u * (slopes[j + 1] - slopes[j]), 0.0};
  };
  h.h = [slopes, locate, step](const P2& w) {
    const auto [j, u] = locate(w[0]);
    double v = 0;
    for (std::size_t i = 0; i < j; ++i) v += 0.5 * step * (slopes[i] + slopes[i + 1]);
    return v + step * (u * slopes[j] + 0.5 * u * u * (slopes[j + 1] - slopes[j]));
  };
  h.hess = [slopes, locate, step](const P2& w) {
    const auto [j, u] = locate(w[0]);
    return std::array<double, 3>{(slopes[j + 1] - slopes[j]) / step, 0.0, 0.0};
  };
  return h;
}

ConvexProfile poly2_profile(std::vector<std::vector<double>> c, std::array<double, 4> rect) {
  check_interval(rect[0], rect[1]);
  check_interval(rect[2], rect[3]);
  if (c.empty()) throw Error("poly2 profile needs coefficients");
  ConvexProfile h;
  h.name = "poly2";
  h.dim = 2;
  h.domain = rect;
  auto term = [](const std::vector<std::vector<double>>& c, const P2& w, int dx, int dy) {
    double v = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c[i].size(); ++j) {
        if (c[i][j] == 0 || static_cast<int>(i) < dx || static_cast<int>(j) < dy) continue;
        double f = c[i][j];
        for (int a = 0; a < dx; ++a) f *= static_cast<double>(i - a);
        for (int b = 0; b < dy; ++b) f *= static_cast<double>(j - b);
        v += f * ipow(w[0], static_cast<int>(i) - dx) * ipow(w[1], static_cast<int>(j) - dy);
      }
    return v;
  };
  h.h = [c, term](const P2& w) { return term(c, w, 0, 0); };
  h.grad = [c, term](const P2& w) { return P2{term(c, w, 1, 0), term(c, w, 0, 1)}; };
  h.hess = [c, term](const P2& w) { return std::array<double, 3>{term(c, w, 2, 0), term(c, w, 1, 1), term(c, w, 0, 2)}; };
  h.check_convex();
  return h;
}

ToriCount rational_tori_count(const ConvexProfile& h, int k) {
  if (k < 1) throw Error("rational_tori_count: k must be >= 1");
  ToriCount out;
  const auto& d = h.domain;
  if (h.dim == 1) {
    const auto slope = [&](double x) { return h.grad({x, 0.0})[0]; };
    out.faces.push_back(edge_face("interior", slope, d[0], d[1], k, [](double x) { return P2{x, 0.0}; }));
    out.faces.push_back(vertex_face("left", {d[0], 0.0}));
    out.faces.push_back(vertex_face("right", {d[1], 0.0}));
  } else if (h.dim == 2) {
    // Interior: lattice gradients g whose tilted minimizer is interior.
    double gx0 = kInf, gx1 = -kInf, gy0 = kInf, gy1 = -kInf;
    const int n = 100;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const P2 g = h.grad({d[0] + (d[1] - d[0]) * i / n, d[2] + (d[3] - d[2]) * j / n});
        gx0 = std::min(gx0, g[0]);
        gx1 = std::max(gx1, g[0]);
        gy0 = std::min(gy0, g[1]);
        gy1 = std::max(gy1, g[1]);
      }
    FaceCount top{"interior", 2, 0, 0, {}};
    const double margin = 1e-9 * std::max(d[1] - d[0], d[3] - d[2]);
    for (double p = std::ceil(snap(gx0, k)) - 1; p <= std::floor(snap(gx1, k)) + 1; ++p)
      for (double q = std::ceil(snap(gy0, k)) - 1; q <= std::floor(snap(gy1, k)) + 1; ++q) {
        const P2 g{p / k, q / k};
        const P2 w = minimize_tilted(h, g);
        const P2 gw = h.grad(w);
        if (std::hypot(gw[0] - g[0], gw[1] - g[1]) > 1e-8) continue;
        ++top.closed;
        if (w[0] - d[0] > margin && d[1] - w[0] > margin && w[1] - d[2] > margin && d[3] - w[1] > margin) {
          ++top.count;
          top.points.push_back(w);
        }
      }
    out.faces.push_back(std::move(top));
    out.faces.push_back(edge_face("y=y0", [&](double x) { return h.grad({x, d[2]})[0]; }, d[0], d[1], k,
                                  [&](double x) { return P2{x, d[2]}; }));
    out.faces.push_back(edge_face("y=y1", [&](double x) { return h.grad({x, d[3]})[0]; }, d[0], d[1], k,
                                  [&](double x) { return P2{x, d[3]}; }));
    out.faces.push_back(edge_face("x=x0", [&](double y) { return h.grad({d[0], y})[1]; }, d[2], d[3], k,
                                  [&](double y) { return P2{d[0], y}; }));
    out.faces.push_back(edge_face("x=x1", [&](double y) { return h.grad({d[1], y})[1]; }, d[2], d[3], k,
                                  [&](double y) { return P2{d[1], y}; }));
    for (double x : {d[0], d[1]})
      for (double y : {d[2], d[3]}) out.faces.push_back(vertex_face(fmt::format("({}, {})", x, y), {x, y}));
  } else {
    throw Error("rational_tori_count: profile dimension must be 1 or 2");
  }
  for (const auto& f : out.faces) out.total += f.count;
  out.interior_closed = out.faces.front().closed;
  return out;
}

std::size_t fixed_point_bound(const ConvexProfile& h, int k) {
  if (k < 1) throw Error("fixed_point_bound: k must be >= 1");
  std::size_t b = 0;
  for (const auto& f : rational_tori_count(h, k).faces) b += (std::size_t{1} << f.dim) * f.closed;
  return b;
}

void EllipsoidSpec::validate() const {
  if (a.empty()) throw Error("ellipsoid: need at least one axis");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] > 0 && std::isfinite(a[i]))) throw Error(fmt::format("ellipsoid: a[{}] must be positive and finite", i));
}

bool EllipsoidSpec::rationally_independent() const {
  validate();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      // Continued-fraction convergents of a_i/a_j up to denominator 10^6.
      const double r = a[i] / a[j];
      double x = r, p0 = 1, q0 = 0, p1 = std::floor(x), q1 = 1;
      for (int it = 0; it < 64 && q1 <= 1e6; ++it) {
        if (std::abs(r - p1 / q1) <= 1e-12 * r) return false;
        const double f = x - std::floor(x);
        if (f < 1e-15) break;
        x = 1 / f;
        const double t = std::floor(x);
        const double p2 = t * p1 + p0, q2 = t * q1 + q0;
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
      }
    }
  return true;
}

namespace {

std::size_t multiples_below(double a, double s) {
  auto c = static_cast<std::size_t>(std::floor(s / a));
  while (static_cast<double>(c + 1) * a <= s) ++c;
  while (c > 0 && static_cast<double>(c) * a > s) --c;
  return c;
}

}  // namespace

EllipsoidSpectrum ellipsoid_spectrum(const EllipsoidSpec& e, double s) {
  e.validate();
  if (!(s >= 0)) throw Error("ellipsoid_spectrum: s must be >= 0");
  EllipsoidSpectrum out;
  for (double a : e.a)
    for (std::size_t m = 1; m <= multiples_below(a, s); ++m) out.actions.push_back(static_cast<double>(m) * a);
  std::sort(out.actions.begin(), out.actions.end());
  out.generator_count = out.actions.size();
  return out;
}

GrowthSeries ellipsoid_counts(const EllipsoidSpec& e, const std::vector<double>& s_grid) {
  e.validate();
  GrowthSeries g;
  for (double s : s_grid) {
    if (!(s >= 0)) throw Error("ellipsoid_counts: s must be >= 0");
    std::size_t c = 0;
    for (double a : e.a) c += multiples_below(a, s);
    g.index.push_back(s);
    g.counts.push_back(static_cast<double>(c));
  }
  g.validate();
  return g;
}

void SemiAdmissibleProfile::validate() const {
  if (!(r_max > 1)) throw Error("semi-admissible profile: r_max must be > 1");
  if (std::abs(h(1.0)) > 1e-12) throw Error("semi-admissible profile: h(1) must be 0");
  const int n = 10000;
  double prev = -kInf;
  for (int i = 0; i <= n; ++i) {
    const double r = 1 + (r_max - 1) * i / n;
    if (dh(r) < -1e-12) throw Error(fmt::format("semi-admissible profile: h' < 0 at r = {}", r));
    if (d2h(r) < -1e-12) throw Error(fmt::format("semi-admissible profile: h'' < 0 at r = {}", r));
    const double a = action(r);
    if (a < prev - 1e-12) throw Error(fmt::format("semi-admissible profile: action decreases at r = {}", r));
    prev = a;
  }
}

SemiAdmissibleProfile semi_admissible_power(double c, double p, double r_max) {
  if (!(c > 0) || !(p > 1)) throw Error("semi-admissible power profile needs c > 0 and p > 1");
  SemiAdmissibleProfile s;
  s.name = fmt::format("c(r-1)^p, c={}, p={}", format_real(c), format_real(p));
  s.r_max = r_max;
  s.h = [c, p](double r) { return c * std::pow(r - 1, p); };
  s.dh = [c, p](double r) { return c * p * std::pow(r - 1, p - 1); };
  s.d2h = [c, p](double r) { return p == 2 ? 2 * c : c * p * (p - 1) * std::pow(r - 1, p - 2); };
  s.validate();
  return s;
}

OrbitLevel reeb_orbit_level(const SemiAdmissibleProfile& p, double T) {
  p.validate();
  const double slope = p.slope();
  if (!(T > 0 && T < slope))
    throw Error(fmt::format("no orbit level: T = {} must lie in (0, {})", format_real(T), format_real(slope)));
  // Leftmost r with h'(r) >= T and rightmost with h'(r) <= T.
  double a = 1, b = p.r_max;
  while (b - a > 1e-13) {
    const double m = 0.5 * (a + b);
    (p.dh(m) < T ? a : b) = m;
  }
  const double left = b;
  a = 1, b = p.r_max;
  while (b - a > 1e-13) {
    const double m = 0.5 * (a + b);
    (p.dh(m) <= T ? a : b) = m;
  }
  if (a - left > 1e-9) throw Error(fmt::format("h' is not strictly increasing near the level T = {}", format_real(T)));
  OrbitLevel lv;
  lv.r_star = 0.5 * (left + a);
  lv.action = p.action(lv.r_star);
  return lv;
}

void LatticeBasis::validate() const {
  for (double v : {v1[0], v1[1], v2[0], v2[1]})
    if (!std::isfinite(v)) throw Error("lattice basis entries must be finite");
  if (std::abs(det()) <= 1e-12) throw Error("lattice basis vectors are linearly dependent");
}

std::vector<double> flat_torus_energies(const LatticeBasis& b, double s) {
  b.validate();
  if (!(s >= 0)) throw Error("flat_torus_energies: s must be >= 0");
  std::vector<double> e;
  const double l = std::sqrt(s), det = std::abs(b.det());
  // Cramer: |m| ≤ ℓ|v2|/|det|, |n| ≤ ℓ|v1|/|det|.
  const auto mm = static_cast<long>(std::ceil(l * std::hypot(b.v2[0], b.v2[1]) / det));
  const auto nn = static_cast<long>(std::ceil(l * std::hypot(b.v1[0], b.v1[1]) / det));
  for (long m = -mm; m <= mm; ++m)
    for (long n = -nn; n <= nn; ++n) {
      if (m == 0 && n == 0) continue;
      const double x = m * b.v1[0] + n * b.v2[0], y = m * b.v1[1] + n * b.v2[1];
      const double en = x * x + y * y;
      if (en < s) e.push_back(en);
    }
  std::sort(e.begin(), e.end());
  return e;
}

Barcode flat_torus_loop_barcode(const LatticeBasis& b, double s) {
  std::vector<Bar> bars{{0.0, kInf, 1, 0}, {0.0, kInf, 2, 1}, {0.0, kInf, 1, 2}};
  for (double e : flat_torus_energies(b, s)) {
    bars.push_back({e, kInf, 1, 0});
    bars.push_back({e, kInf, 1, 1});
  }
  return Barcode(std::move(bars));
}

GrowthSeries flat_torus_counts(const LatticeBasis& b, const std::vector<double>& s_grid) {
  if (s_grid.empty()) throw Error("flat_torus_counts: empty s grid");
  const auto e = flat_torus_energies(b, *std::max_element(s_grid.begin(), s_grid.end()) + 1);
  GrowthSeries g;
  for (double s : s_grid) {
    g.index.push_back(s);
    const auto below = static_cast<double>(std::lower_bound(e.begin(), e.end(), s) - e.begin());
    g.counts.push_back(2 * below + 4);
  }
  g.validate();
  return g;
}

}  // namespace hbar
