#include "hbar/integral_geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hbar/barcode.hpp"

namespace hbar {

double polyline_length(const Polyline& c) {
  double l = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) l += std::hypot(c[i + 1][0] - c[i][0], c[i + 1][1] - c[i][1]);
  return l;
}

std::vector<P2> periods(ModelSpace s) {
  switch (s) {
    case ModelSpace::Plane: return {};
    case ModelSpace::Torus: return {{1.0, 0.0}, {0.0, 1.0}};
    case ModelSpace::Cylinder: return {{2 * M_PI, 0.0}};
  }
  return {};
}

namespace {

int sgn(double v) { return v > 0 ? 1 : -1; }

bool near_zero(double d, double ux, double uy, double wx, double wy) {
  return std::abs(d) <= 1e-13 * (std::abs(ux) + std::abs(uy)) * (std::abs(wx) + std::abs(wy));
}

// Side of r + e relative to the segment p→q, e = (δ, δ²).
int side_of_b(const P2& p, const P2& q, const P2& r, bool& flat) {
  const double ux = q[0] - p[0], uy = q[1] - p[1];
  const double wx = r[0] - p[0], wy = r[1] - p[1];
  const double d = ux * wy - uy * wx;
  flat = near_zero(d, ux, uy, wx, wy);
  if (!flat) return sgn(d);
  // u × e = ux·δ² − uy·δ.
  if (uy != 0) return uy > 0 ? -1 : 1;
  return ux > 0 ? 1 : -1;
}

// Side of p relative to the segment (r + e)→(s + e).
int side_of_a(const P2& r, const P2& s, const P2& p) {
  const double vx = s[0] - r[0], vy = s[1] - r[1];
  const double wx = p[0] - r[0], wy = p[1] - r[1];
  const double d = vx * wy - vy * wx;
  if (!near_zero(d, vx, vy, wx, wy)) return sgn(d);
  // −(v × e) = −vx·δ² + vy·δ.
  if (vy != 0) return vy > 0 ? 1 : -1;
  return vx > 0 ? -1 : 1;
}

struct Box {
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  void add(const P2& p) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
};

std::size_t count_against(const P2& p, const P2& q, const Polyline& b, const P2& shift, std::vector<int>& side,
                          std::vector<char>& flat) {
  const std::size_t n = b.size();
  for (std::size_t j = 0; j < n; ++j) {
    bool f;
    side[j] = side_of_b(p, q, {b[j][0] + shift[0], b[j][1] + shift[1]}, f);
    flat[j] = f;
  }
  std::size_t count = 0;
  const double ux = q[0] - p[0], uy = q[1] - p[1], uu = ux * ux + uy * uy;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const P2 r{b[j][0] + shift[0], b[j][1] + shift[1]};
    const P2 s{b[j + 1][0] + shift[0], b[j + 1][1] + shift[1]};
    if (flat[j] && flat[j + 1] && uu > 0) {
      const double t0 = (r[0] - p[0]) * ux + (r[1] - p[1]) * uy;
      const double t1 = (s[0] - p[0]) * ux + (s[1] - p[1]) * uy;
      const double lo = std::max(0.0, std::min(t0, t1)), hi = std::min(uu, std::max(t0, t1));
      if (hi - lo > 1e-12 * uu) throw Error("non-transverse family member: overlapping collinear segments");
    }
    if (side[j] == side[j + 1]) continue;
    if (side_of_a(r, s, p) != side_of_a(r, s, q)) ++count;
  }
  return count;
}

}  // namespace

std::size_t curve_intersections(ModelSpace space, const Polyline& a, const Polyline& b) {
  if (a.size() < 2 || b.size() < 2) return 0;
  Box bb;
  for (const auto& p : b) bb.add(p);
  const auto per = periods(space);
  std::vector<int> side(b.size());
  std::vector<char> flat(b.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const P2& p = a[i];
    const P2& q = a[i + 1];
    Box ab;
    ab.add(p);
    ab.add(q);
    // Translates b + n·period whose bounding box can meet the segment.
    long nx0 = 0, nx1 = 0, ny0 = 0, ny1 = 0;
    if (!per.empty()) {
      const double px = per[0][0];
      nx0 = static_cast<long>(std::ceil((ab.x0 - bb.x1) / px - 1e-9));
      nx1 = static_cast<long>(std::floor((ab.x1 - bb.x0) / px + 1e-9));
    }
    if (per.size() == 2) {
      ny0 = static_cast<long>(std::ceil(ab.y0 - bb.y1 - 1e-9));
      ny1 = static_cast<long>(std::floor(ab.y1 - bb.y0 + 1e-9));
    }
    for (long nx = nx0; nx <= nx1; ++nx)
      for (long ny = ny0; ny <= ny1; ++ny) {
        P2 shift{0.0, 0.0};
        if (!per.empty()) shift[0] = static_cast<double>(nx) * per[0][0];
        if (per.size() == 2) shift[1] = static_cast<double>(ny);
        total += count_against(p, q, b, shift, side, flat);
      }
  }
  return total;
}

double Tomograph::measure() const {
  if (ball) return std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0 + 1) * std::pow(radius, dim);
  double m = 1;
  for (int j = 0; j < dim; ++j) m *= hi[j] - lo[j];
  return m;
}

std::vector<double> Tomograph::sample(Rng& rng) const {
  std::vector<double> xi(static_cast<std::size_t>(dim));
  if (!ball) {
    for (int j = 0; j < dim; ++j) xi[j] = rng.uniform(lo[j], hi[j]);
    return xi;
  }
  // Gaussian direction (Box–Muller) and radius r·U^{1/d}.
  double norm = 0;
  for (int j = 0; j < dim; j += 2) {
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    const double g = std::sqrt(-2 * std::log(u1));
    xi[j] = g * std::cos(2 * M_PI * u2);
    if (j + 1 < dim) xi[j + 1] = g * std::sin(2 * M_PI * u2);
  }
  for (double v : xi) norm += v * v;
  norm = std::sqrt(norm);
  const double rho = radius * std::pow(rng.uniform(), 1.0 / dim);
  for (double& v : xi) v = norm > 0 ? v * rho / norm : 0.0;
  return xi;
}

Polyline Tomograph::curve(const std::vector<double>& xi) const {
  Polyline c;
  c.reserve(knots.size());
  for (double x : knots) c.push_back(psi(xi, x));
  return c;
}

Tomograph line_tomograph(double r) {
  if (!(r > 0)) throw Error("line tomograph: radius must be > 0");
  Tomograph t;
  t.name = fmt::format("lines(r={})", format_real(r));
  t.space = ModelSpace::Plane;
  t.dim = 2;
  t.lo = {-r, 0.0};
  t.hi = {r, M_PI};
  t.knots = {0.0, 1.0};
  t.psi = [r](const std::vector<double>& xi, double x) {
    const double c = std::cos(xi[1]), s = std::sin(xi[1]);
    const double along = (2 * x - 1) * 2 * r;
    return P2{xi[0] * c - along * s, xi[0] * s + along * c};
  };
  t.region = {-r, r, -r, r};
  return t;
}

Tomograph translation_tomograph(const Polyline& core, double r) {
  if (core.size() < 2) throw Error("translation tomograph: core needs at least 2 points");
  if (!(r >= 0)) throw Error("translation tomograph: radius must be >= 0");
  const double len = polyline_length(core);
  if (!(len > 0)) throw Error("translation tomograph: core has zero length");
  Tomograph t;
  t.name = fmt::format("translation(r={})", format_real(r));
  t.space = ModelSpace::Torus;
  t.dim = 2;
  t.ball = true;
  t.radius = r;
  double acc = 0;
  t.knots.push_back(0.0);
  for (std::size_t i = 0; i + 1 < core.size(); ++i) {
    acc += std::hypot(core[i + 1][0] - core[i][0], core[i + 1][1] - core[i][1]);
    t.knots.push_back(i + 2 == core.size() ? 1.0 : acc / len);
  }
  const auto knots = t.knots;
  t.psi = [core, knots](const std::vector<double>& xi, double x) {
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    std::size_t j = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
    j = std::min(j, core.size() - 2);
    const double w = knots[j + 1] > knots[j] ? (x - knots[j]) / (knots[j + 1] - knots[j]) : 0.0;
    return P2{core[j][0] + w * (core[j + 1][0] - core[j][0]) + xi[0],
              core[j][1] + w * (core[j + 1][1] - core[j][1]) + xi[1]};
  };
  t.region = {0.0, 1.0, 0.0, 1.0};
  return t;
}

Tomograph cylinder_graph_tomograph(int d, double r, int segments) {
  if (d < 2) throw Error("cylinder graph tomograph: need d >= 2 (the circle has no immersion into R^1)");
  if (!(r >= 0)) throw Error("cylinder graph tomograph: radius must be >= 0");
  if (segments < 8) throw Error("cylinder graph tomograph: need at least 8 segments");
  Tomograph t;
  t.name = fmt::format("cylinder_graph(d={}, r={})", d, format_real(r));
  t.space = ModelSpace::Cylinder;
  t.dim = d;
  t.ball = true;
  t.radius = r;
  for (int j = 0; j <= segments; ++j) t.knots.push_back(static_cast<double>(j) / segments);
  t.psi = [d](const std::vector<double>& xi, double x) {
    // x = 1 is the start point shifted by the period, exactly.
    const double th = x >= 1.0 ? 0.0 : 2 * M_PI * x;
    double p = 0;
    for (int j = 0; j < d; ++j) {
      const double m = j / 2 + 1;
      p += j % 2 == 0 ? -xi[j] * m * std::sin(m * th) : xi[j] * m * std::cos(m * th);
    }
    return P2{x >= 1.0 ? 2 * M_PI : th, p};
  };
  double bound = 0;
  for (int j = 0; j < d; ++j) bound += (j / 2 + 1) * (j / 2 + 1);
  const double pmax = std::max(1.0, r * std::sqrt(bound));
  t.region = {0.0, 2 * M_PI, -pmax, pmax};
  return t;
}

Density2D::Density2D(ModelSpace space, std::array<double, 4> region, int nx, int ny, int na)
    : space_(space), region_(region), nx_(nx), ny_(ny), na_(na),
      w_(static_cast<std::size_t>(nx) * ny * na, 0.0) {
  if (nx < 1 || ny < 1 || na < 1) throw Error("Density2D: grid sizes must be positive");
  if (!(region[1] > region[0] && region[3] > region[2])) throw Error("Density2D: empty region");
}

long Density2D::cell(P2 y) const {
  const auto per = periods(space_);
  if (!per.empty()) y[0] = region_[0] + std::fmod(std::fmod(y[0] - region_[0], per[0][0]) + per[0][0], per[0][0]);
  if (per.size() == 2) y[1] = region_[2] + std::fmod(std::fmod(y[1] - region_[2], 1.0) + 1.0, 1.0);
  const double fx = (y[0] - region_[0]) / (region_[1] - region_[0]);
  const double fy = (y[1] - region_[2]) / (region_[3] - region_[2]);
  if (fx < 0 || fx >= 1 || fy < 0 || fy >= 1) return -1;
  const long ix = std::min<long>(nx_ - 1, static_cast<long>(fx * nx_));
  const long iy = std::min<long>(ny_ - 1, static_cast<long>(fy * ny_));
  return ix * ny_ + iy;
}

void Density2D::accumulate(const P2& y, const P2& tangent, double weight) {
  const long c = cell(y);
  if (c < 0) return;
  double a = std::atan2(tangent[1], tangent[0]);
  if (a < 0) a += M_PI;
  if (a >= M_PI) a -= M_PI;
  const long b = std::min<long>(na_ - 1, static_cast<long>(a / M_PI * na_));
  const double area = (region_[1] - region_[0]) * (region_[3] - region_[2]) / (static_cast<double>(nx_) * ny_);
  w_[static_cast<std::size_t>(c * na_ + b)] += weight * std::hypot(tangent[0], tangent[1]) / area;
}

double Density2D::operator()(const P2& y, const P2& v) const {
  const long c = cell(y);
  if (c < 0) return 0.0;
  double d = 0;
  for (int b = 0; b < na_; ++b) {
    const double w = w_[static_cast<std::size_t>(c * na_ + b)];
    if (w == 0) continue;
    const double phi = (b + 0.5) * M_PI / na_;
    d += w * std::abs(v[0] * std::sin(phi) - v[1] * std::cos(phi));
  }
  return d;
}

double Density2D::fiber_volume(const P2& y) const {
  const long c = cell(y);
  if (c < 0) return 0.0;
  double s = 0;
  for (int b = 0; b < na_; ++b) s += w_[static_cast<std::size_t>(c * na_ + b)];
  return s;
}

double Density2D::max_fiber_volume() const {
  double m = 0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(nx_) * ny_; ++c) {
    double s = 0;
    for (int b = 0; b < na_; ++b) s += w_[c * na_ + b];
    m = std::max(m, s);
  }
  return m;
}

double Density2D::integrate(const Polyline& c) const {
  const double h = 0.25 * std::min((region_[1] - region_[0]) / nx_, (region_[3] - region_[2]) / ny_);
  double total = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double dx = c[i + 1][0] - c[i][0], dy = c[i + 1][1] - c[i][1];
    const auto pieces = std::max<long>(1, static_cast<long>(std::ceil(std::hypot(dx, dy) / h)));
    const P2 v{dx / pieces, dy / pieces};
    for (long k = 0; k < pieces; ++k) {
      const double t = (k + 0.5) / pieces;
      total += (*this)({c[i][0] + t * dx, c[i][1] + t * dy}, v);
    }
  }
  return total;
}

void Density2D::merge(const Density2D& o) {
  if (o.w_.size() != w_.size()) throw Error("Density2D::merge: grid mismatch");
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] += o.w_[i];
}

void Density2D::scale(double s) {
  for (auto& w : w_) w *= s;
}

namespace {

constexpr std::size_t kShard = 4096;

struct DensitySample {
  P2 y, tangent;
};

// One (ξ, x) sample: the point of L_ξ at x and the polyline tangent there.
DensitySample density_sample(const Tomograph& t, Rng& rng) {
  const auto xi = t.sample(rng);
  const double x = rng.uniform();
  auto it = std::upper_bound(t.knots.begin(), t.knots.end(), x);
  std::size_t j = static_cast<std::size_t>(it - t.knots.begin());
  j = std::clamp<std::size_t>(j, 1, t.knots.size() - 1) - 1;
  const double x0 = t.knots[j], x1 = t.knots[j + 1];
  const P2 a = t.psi(xi, x0), b = t.psi(xi, x1);
  const P2 w{(b[0] - a[0]) / (x1 - x0), (b[1] - a[1]) / (x1 - x0)};
  return {{a[0] + (x - x0) * w[0], a[1] + (x - x0) * w[1]}, w};
}

Density2D density_from(const Tomograph& t, int resolution, std::size_t samples, std::uint64_t seed,
                       const char* stream, Exec exec) {
  if (resolution < 1) throw Error("pushforward_density: resolution must be positive");
  if (samples == 0) throw Error("pushforward_density: need at least one sample");
  if (t.knots.size() < 2) throw Error("pushforward_density: tomograph has no segments");
  Density2D d(t.space, t.region, resolution, resolution, 90);
  const std::size_t shards = (samples + kShard - 1) / kShard;
  std::vector<std::vector<DensitySample>> drawn(shards);
  auto shard = [&](std::size_t s) {
    Rng rng(seed, stream, s);
    const std::size_t n = std::min(kShard, samples - s * kShard);
    drawn[s].reserve(n);
    for (std::size_t i = 0; i < n; ++i) drawn[s].push_back(density_sample(t, rng));
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(shards); ++s) shard(static_cast<std::size_t>(s));
  } else {
    for (std::size_t s = 0; s < shards; ++s) shard(s);
  }
  const double weight = t.measure() / static_cast<double>(samples);
  for (const auto& v : drawn)
    for (const auto& smp : v) d.accumulate(smp.y, smp.tangent, weight);
  return d;
}

struct ShardSum {
  double n = 0, n2 = 0;
  std::size_t rejected = 0;
};

}  // namespace

double submersion_rate(const Tomograph& t, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error("submersion_rate: need at least one sample");
  Rng rng(seed, "submersion");
  std::size_t good = 0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < samples; ++i) {
    auto xi = t.sample(rng);
    const double x = rng.uniform(h, 1 - h);
    const P2 y = t.psi(xi, x);
    std::vector<P2> cols;
    const P2 yx = t.psi(xi, x + h);
    cols.push_back({(yx[0] - y[0]) / h, (yx[1] - y[1]) / h});
    for (int j = 0; j < t.dim; ++j) {
      auto e = xi;
      e[j] += h;
      const P2 yj = t.psi(e, x);
      cols.push_back({(yj[0] - y[0]) / h, (yj[1] - y[1]) / h});
    }
    double best = 0;
    for (std::size_t a = 0; a < cols.size(); ++a)
      for (std::size_t b = a + 1; b < cols.size(); ++b)
        best = std::max(best, std::abs(cols[a][0] * cols[b][1] - cols[a][1] * cols[b][0]));
    if (best > 1e-6) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(samples);
}

Density2D pushforward_density(const Tomograph& t, int resolution, std::size_t samples, std::uint64_t seed,
                              Exec exec) {
  return density_from(t, resolution, samples, seed, "density", exec);
}

CroftonReport crofton_mc(const Tomograph& t, const Polyline& target, std::size_t samples, std::uint64_t seed,
                         Exec exec) {
  if (samples < 1000) throw Error("crofton_mc: need at least 1000 samples");
  if (target.size() < 2) throw Error("crofton_mc: target needs at least 2 points");
  const std::size_t shards = (samples + kShard - 1) / kShard;
  std::vector<ShardSum> sums(shards);
  auto shard = [&](std::size_t s) {
    Rng rng(seed, "crofton", s);
    const std::size_t n = std::min(kShard, samples - s * kShard);
    ShardSum& out = sums[s];
    for (std::size_t i = 0; i < n;) {
      const auto c = t.curve(t.sample(rng));
      try {
        const auto k = static_cast<double>(curve_intersections(t.space, c, target));
        out.n += k;
        out.n2 += k * k;
        ++i;
      } catch (const Error&) {
        // Non-transverse parameter: resample, up to a hard cap.
        if (++out.rejected > n) break;
      }
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(shards); ++s) shard(static_cast<std::size_t>(s));
  } else {
    for (std::size_t s = 0; s < shards; ++s) shard(s);
  }
  CroftonReport r;
  double n = 0, n2 = 0;
  for (const auto& s : sums) {
    n += s.n;
    n2 += s.n2;
    r.rejected += s.rejected;
  }
  if (static_cast<double>(r.rejected) > 0.01 * static_cast<double>(samples))
    throw Error(fmt::format("crofton_mc: {} of {} sampled parameters non-transverse (> 1%); the family is not "
                            "transverse to the target almost everywhere",
                            r.rejected, samples));
  const double mean = n / static_cast<double>(samples);
  const double var = std::max(0.0, n2 / static_cast<double>(samples) - mean * mean);
  const double vol = t.measure();
  r.samples = samples;
  r.integral = vol * mean;
  r.std_error = vol * std::sqrt(var / static_cast<double>(samples));
  r.volume = polyline_length(target);
  r.constant = density_from(t, 16, samples, seed, "crofton-constant", exec).max_fiber_volume();
  r.pass = r.integral <= r.constant * r.volume + 3 * r.std_error;
  return r;
}

FormulaCheck crofton_formula_check(const Tomograph& t, const Polyline& target, std::size_t samples, int resolution,
                                   std::uint64_t seed, Exec exec) {
  FormulaCheck f;
  const auto mc = crofton_mc(t, target, samples, seed, exec);
  f.mc = mc.integral;
  f.mc_stderr = mc.std_error;
  constexpr int kBatches = 16;
  std::vector<double> vals;
  for (int b = 0; b < kBatches; ++b) {
    Rng sub(seed, "formula-batch", static_cast<std::uint64_t>(b));
    vals.push_back(density_from(t, resolution, std::max<std::size_t>(1, samples / kBatches), sub.next(),
                                "density", exec)
                       .integrate(target));
  }
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= kBatches;
  double var = 0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= kBatches - 1;
  f.density = mean;
  f.density_stderr = std::sqrt(var / kBatches);
  const double se = std::hypot(f.mc_stderr, f.density_stderr);
  f.z = se > 0 ? std::abs(f.mc - f.density) / se : (f.mc == f.density ? 0.0 : kInf);
  f.pass = f.z <= 3.0;
  return f;
}

Polyline regular_polygon(P2 centre, double radius, int sides) {
  if (sides < 3) throw Error("regular_polygon: need at least 3 sides");
  Polyline c;
  for (int i = 0; i <= sides; ++i) {
    const double a = 2 * M_PI * (i % sides) / sides;
    c.push_back({centre[0] + radius * std::cos(a), centre[1] + radius * std::sin(a)});
  }
  return c;
}

std::string polyline_to_csv(const Polyline& c) {
  std::string out = "x,y\n";
  for (const auto& p : c) out += format_real(p[0]) + "," + format_real(p[1]) + "\n";
  return out;
}

Polyline polyline_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Polyline c;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(fmt::format("polyline CSV line {}: expected x,y", lineno));
    const std::string xs = line.substr(0, comma), ys = line.substr(comma + 1);
    char* end = nullptr;
    const double x = std::strtod(xs.c_str(), &end);
    if (end == xs.c_str()) {
      if (c.empty() && lineno == 1) continue;  // header
      throw Error(fmt::format("polyline CSV line {}: bad number '{}'", lineno, xs));
    }
    const double y = std::strtod(ys.c_str(), &end);
    if (end == ys.c_str() || !std::isfinite(x) || !std::isfinite(y))
      throw Error(fmt::format("polyline CSV line {}: bad number '{}'", lineno, ys));
    c.push_back({x, y});
  }
  if (c.size() < 2) throw Error("polyline CSV: need at least 2 points");
  return c;
}

}  // namespace hbar
