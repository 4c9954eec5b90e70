#include "hbar/dynamics.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace hbar {

namespace {

double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

double circle_gap(double a, double b) {
  const double d = std::abs(frac(a) - frac(b));
  return std::min(d, 1.0 - d);
}

using i128 = __int128;

i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("integer overflow in exact periodic arithmetic");
  return r;
}

i128 checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("integer overflow in exact periodic arithmetic");
  return r;
}

using IMat = std::array<std::array<i128, 2>, 2>;

IMat mat_mul(const IMat& x, const IMat& y) {
  IMat r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = checked_add(checked_mul(x[i][0], y[0][j]), checked_mul(x[i][1], y[1][j]));
  return r;
}

IMat mat_pow(const Mat2& a, int k) {
  IMat r{{{1, 0}, {0, 1}}};
  const IMat b{{{a[0][0], a[0][1]}, {a[1][0], a[1][1]}}};
  for (int i = 0; i < k; ++i) r = mat_mul(r, b);
  return r;
}

// det(A^k − I) = det(A)^k − tr(A^k) + 1, free of products of large entries.
i128 det_minus_identity(const Mat2& a, int k) {
  const IMat p = mat_pow(a, k);
  i128 d = 1;
  const i128 det = static_cast<i128>(a[0][0]) * a[1][1] - static_cast<i128>(a[0][1]) * a[1][0];
  for (int i = 0; i < k; ++i) d = checked_mul(d, det);
  return checked_add(checked_add(d, -checked_add(p[0][0], p[1][1])), 1);
}

}  // namespace

DynamicalSystem DynamicalSystem::circle_degree(int m) {
  if (m == 0) throw Error("circle map degree must be nonzero");
  DynamicalSystem s;
  s.kind_ = SystemKind::CircleDegree;
  s.m_ = m;
  return s;
}

DynamicalSystem DynamicalSystem::rotation(double alpha) {
  if (!std::isfinite(alpha)) throw Error("rotation angle must be finite");
  DynamicalSystem s;
  s.kind_ = SystemKind::Rotation;
  s.m_ = 1;
  s.alpha_ = alpha;
  return s;
}

DynamicalSystem DynamicalSystem::custom_circle(int m, std::vector<double> table) {
  if (table.empty()) throw Error("custom circle map needs a nonempty perturbation table");
  for (double v : table)
    if (!std::isfinite(v)) throw Error("custom circle table entries must be finite");
  DynamicalSystem s;
  s.kind_ = SystemKind::CustomCircle;
  s.m_ = m;
  s.table_ = std::move(table);
  return s;
}

DynamicalSystem DynamicalSystem::linear_torus(const Mat2& a) {
  const auto det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  if (det == 0) throw Error("linear torus map must have nonzero determinant");
  DynamicalSystem s;
  s.kind_ = SystemKind::LinearTorus;
  s.a_ = a;
  return s;
}

DynamicalSystem DynamicalSystem::shift(int alphabet) {
  if (alphabet < 2 || alphabet > 255) throw Error("shift alphabet size must be in [2, 255]");
  DynamicalSystem s;
  s.kind_ = SystemKind::Shift;
  s.alphabet_ = alphabet;
  return s;
}

std::string DynamicalSystem::name() const {
  switch (kind_) {
    case SystemKind::CircleDegree: return fmt::format("circle_degree({})", m_);
    case SystemKind::Rotation: return fmt::format("rotation({})", format_real(alpha_));
    case SystemKind::CustomCircle: return fmt::format("custom_circle({}, {} knots)", m_, table_.size());
    case SystemKind::LinearTorus:
      return fmt::format("linear_torus([[{},{}],[{},{}]])", a_[0][0], a_[0][1], a_[1][0], a_[1][1]);
    case SystemKind::Shift: return fmt::format("shift({})", alphabet_);
  }
  return "";
}

int DynamicalSystem::dim() const {
  switch (kind_) {
    case SystemKind::LinearTorus: return 2;
    case SystemKind::Shift: return 0;
    default: return 1;
  }
}

DynamicalSystem DynamicalSystem::power(int m) const {
  if (m < 1) throw Error("power: exponent must be >= 1");
  switch (kind_) {
    case SystemKind::CircleDegree: {
      std::int64_t d = 1;
      for (int i = 0; i < m; ++i) d *= m_;
      return circle_degree(static_cast<int>(d));
    }
    case SystemKind::Rotation: return rotation(alpha_ * m);
    case SystemKind::LinearTorus: {
      const IMat p = mat_pow(a_, m);
      Mat2 r{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = static_cast<std::int64_t>(p[i][j]);
      return linear_torus(r);
    }
    default: throw Error(fmt::format("power is not available for {}", name()));
  }
}

std::array<double, 2> DynamicalSystem::lift(const std::array<double, 2>& x) const {
  switch (kind_) {
    case SystemKind::CircleDegree: return {m_ * x[0], 0.0};
    case SystemKind::Rotation: return {x[0] + alpha_, 0.0};
    case SystemKind::CustomCircle: {
      const double n = static_cast<double>(table_.size());
      const double t = frac(x[0]) * n;
      const auto i = std::min(static_cast<std::size_t>(t), table_.size() - 1);
      const double w = t - static_cast<double>(i);
      const double p = table_[i] + w * (table_[(i + 1) % table_.size()] - table_[i]);
      return {m_ * x[0] + p, 0.0};
    }
    case SystemKind::LinearTorus:
      return {a_[0][0] * x[0] + a_[0][1] * x[1], a_[1][0] * x[0] + a_[1][1] * x[1]};
    case SystemKind::Shift: break;
  }
  throw Error("lift: shift spaces have no lift");
}

double DynamicalSystem::lipschitz() const {
  switch (kind_) {
    case SystemKind::CircleDegree: return std::abs(m_);
    case SystemKind::Rotation: return 1.0;
    case SystemKind::CustomCircle: {
      double s = 0;
      const double n = static_cast<double>(table_.size());
      for (std::size_t i = 0; i < table_.size(); ++i)
        s = std::max(s, std::abs(m_ + n * (table_[(i + 1) % table_.size()] - table_[i])));
      return s;
    }
    case SystemKind::LinearTorus: {
      // Spectral norm from the eigenvalues of AᵀA.
      const double a = a_[0][0], b = a_[0][1], c = a_[1][0], d = a_[1][1];
      const double p = a * a + c * c, q = a * b + c * d, r = b * b + d * d;
      return std::sqrt(0.5 * (p + r) + std::sqrt(0.25 * (p - r) * (p - r) + q * q));
    }
    case SystemKind::Shift: return 2.0;
  }
  return 0.0;
}

Point DynamicalSystem::apply(const Point& p) const {
  Point q;
  if (kind_ == SystemKind::Shift) {
    if (p.center + 1 >= p.word.size()) throw Error("shift window exhausted");
    q.word = p.word;
    q.center = p.center + 1;
    return q;
  }
  const auto l = lift(p.x);
  q.x = {frac(l[0]), dim() == 2 ? frac(l[1]) : 0.0};
  return q;
}

double DynamicalSystem::distance(const Point& p, const Point& q) const {
  if (kind_ == SystemKind::Shift) {
    const std::size_t left = std::min(p.center, q.center);
    const std::size_t right = std::min(p.word.size() - p.center, q.word.size() - q.center);
    for (std::size_t n = 0; n < std::max(left + 1, right); ++n) {
      if (n < right && p.word[p.center + n] != q.word[q.center + n]) return std::ldexp(1.0, -static_cast<int>(n));
      if (n <= left && n > 0 && p.word[p.center - n] != q.word[q.center - n])
        return std::ldexp(1.0, -static_cast<int>(n));
    }
    return 0.0;
  }
  if (dim() == 1) return circle_gap(p.x[0], q.x[0]);
  return std::hypot(circle_gap(p.x[0], q.x[0]), circle_gap(p.x[1], q.x[1]));
}

Point DynamicalSystem::random_point(Rng& rng, int k) const {
  Point p;
  if (kind_ == SystemKind::Shift) {
    const std::size_t len = 2 * static_cast<std::size_t>(k) + 32;
    p.word.resize(len);
    for (auto& s : p.word) s = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(alphabet_)));
    p.center = static_cast<std::size_t>(k) + 16;
    return p;
  }
  p.x[0] = rng.uniform();
  if (dim() == 2) p.x[1] = rng.uniform();
  return p;
}

double dk_distance(const DynamicalSystem& sys, const Point& x, const Point& y, int k) {
  if (k < 1) throw Error("dk_distance: k must be >= 1");
  Point a = x, b = y;
  double d = sys.distance(a, b);
  for (int i = 1; i < k; ++i) {
    a = sys.apply(a);
    b = sys.apply(b);
    d = std::max(d, sys.distance(a, b));
  }
  return d;
}

namespace {

/// Greedy ε-separated selection for circle and torus maps. Accepted orbits
/// are hashed by the ε-cells of their first and last points: a conflicting
/// pair lies in adjacent cells at both ends.
class ContinuousPacker {
 public:
  ContinuousPacker(const DynamicalSystem& sys, double eps, int k)
      : sys_(sys), eps_(eps), k_(k), dim_(sys.dim()),
        cells_(std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(1.0 / eps)))) {}

  /// Offers one start point; returns whether its orbit was accepted.
  bool offer(const std::array<double, 2>& start) {
    Point p;
    p.x = start;
    for (int i = 0; i < k_; ++i) {
      orbit_[2 * i] = p.x[0];
      orbit_[2 * i + 1] = p.x[1];
      if (i + 1 < k_) p = sys_.apply(p);
    }
    if (conflicts(orbit_)) return false;
    accept(orbit_);
    return true;
  }
  std::size_t count() const { return count_; }

 private:
  std::int64_t cell(double v) const {
    return std::min(cells_ - 1, static_cast<std::int64_t>(v * static_cast<double>(cells_)));
  }

  std::uint64_t key(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) const {
    auto w = [&](std::int64_t v) { return static_cast<std::uint64_t>(((v % cells_) + cells_) % cells_); };
    const auto m = static_cast<std::uint64_t>(cells_);
    return ((w(a) * m + w(b)) * m + w(c)) * m + w(d);
  }

  double step_distance(const double* p, const double* q) const {
    const double dx = circle_gap(p[0], q[0]);
    if (dim_ == 1) return dx;
    return std::hypot(dx, circle_gap(p[1], q[1]));
  }

  bool close(const std::vector<double>& orbit, std::size_t id) const {
    const double* other = &store_[id * 2 * static_cast<std::size_t>(k_)];
    for (int i = 0; i < k_; ++i)
      if (step_distance(&orbit[2 * i], &other[2 * i]) > eps_) return false;
    return true;
  }

  bool conflicts(const std::vector<double>& orbit) {
    const std::size_t last = 2 * static_cast<std::size_t>(k_ - 1);
    const std::int64_t a = cell(orbit[0]), b = dim_ == 2 ? cell(orbit[1]) : 0;
    const std::int64_t c = cell(orbit[last]), d = dim_ == 2 ? cell(orbit[last + 1]) : 0;
    const int r2 = dim_ == 2 ? 1 : 0;
    seen_.clear();
    for (int da = -1; da <= 1; ++da)
      for (int db = -r2; db <= r2; ++db)
        for (int dc = -1; dc <= 1; ++dc)
          for (int dd = -r2; dd <= r2; ++dd) {
            const auto kk = key(a + da, b + db, c + dc, d + dd);
            if (std::find(seen_.begin(), seen_.end(), kk) != seen_.end()) continue;
            seen_.push_back(kk);
            auto it = buckets_.find(kk);
            if (it == buckets_.end()) continue;
            for (auto id : it->second)
              if (close(orbit, id)) return true;
          }
    return false;
  }

  void accept(const std::vector<double>& orbit) {
    const std::size_t last = 2 * static_cast<std::size_t>(k_ - 1);
    const auto kk = key(cell(orbit[0]), dim_ == 2 ? cell(orbit[1]) : 0, cell(orbit[last]),
                        dim_ == 2 ? cell(orbit[last + 1]) : 0);
    buckets_[kk].push_back(static_cast<std::uint32_t>(count_));
    store_.insert(store_.end(), orbit.begin(), orbit.end());
    ++count_;
  }

  const DynamicalSystem& sys_;
  double eps_;
  int k_, dim_;
  std::int64_t cells_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
  std::vector<double> store_;
  std::vector<std::uint64_t> seen_;
  std::vector<double> orbit_ = std::vector<double>(2 * static_cast<std::size_t>(k_));
  std::size_t count_ = 0;
};

/// Seeded uniform start points. Any deterministic lattice resonates with
/// dyadic ε and the Bowen balls of linear maps, so none is used.
class CandidateStream {
 public:
  CandidateStream(int dim, std::uint64_t seed) : dim_(dim), rng_(seed, "candidates") {}
  std::array<double, 2> next() { return {rng_.uniform(), dim_ == 2 ? rng_.uniform() : 0.0}; }

 private:
  int dim_;
  Rng rng_;
};

/// Shift packing is exact on words: d_k(x, y) > ε iff x and y differ on
/// positions −(m−1) .. k+m−2, where m is the least integer with 2^−m ≤ ε.
std::size_t shift_words(const DynamicalSystem& sys, double eps, int k, std::size_t n, Rng& rng) {
  int m = 0;
  while (std::ldexp(1.0, -m) > eps) ++m;
  if (m > 16) throw Error("shift packing: eps is below the window resolution 2^-16");
  std::unordered_set<std::string> words;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = sys.random_point(rng, k);
    if (m == 0) {
      words.insert("");
      continue;
    }
    const std::size_t lo = p.center - static_cast<std::size_t>(m - 1);
    const std::size_t hi = p.center + static_cast<std::size_t>(k + m - 2);
    words.emplace(p.word.begin() + static_cast<long>(lo), p.word.begin() + static_cast<long>(hi) + 1);
  }
  return words.size();
}

constexpr std::size_t kOversample = 8;

std::size_t adaptive_packing(const DynamicalSystem& sys, double eps, int k, std::size_t budget,
                             std::uint64_t seed, std::size_t& used, bool& saturated) {
  saturated = false;
  if (sys.kind() == SystemKind::Shift) {
    std::size_t prev = 0, count = 0;
    for (std::size_t n = std::min<std::size_t>(1024, budget);; n *= 2) {
      Rng rng(seed, "candidates", n);
      count = std::max(count, shift_words(sys, eps, k, n, rng));
      used = n;
      if (prev > 0 && static_cast<double>(count) <= 1.01 * static_cast<double>(prev)) {
        saturated = true;
        break;
      }
      prev = count;
      if (2 * n > budget) break;
    }
    return count;
  }
  ContinuousPacker packer(sys, eps, k);
  CandidateStream stream(sys.dim(), seed);
  const std::size_t first = std::min<std::size_t>(1024, budget);
  std::size_t checkpoint = first, prev = 0;
  for (used = 0; used < budget;) {
    packer.offer(stream.next());
    ++used;
    // Saturated once candidates outnumber accepted points kOversample to one
    // (random sequential packing then sits at a fixed fraction of its jamming
    // limit, independent of k), or once doubling the candidates adds < 1%.
    if (used >= first && packer.count() * kOversample <= used) {
      saturated = true;
      break;
    }
    if (used == checkpoint) {
      if (prev > 0 && static_cast<double>(packer.count()) <= 1.01 * static_cast<double>(prev)) {
        saturated = true;
        break;
      }
      prev = packer.count();
      checkpoint *= 2;
    }
  }
  return packer.count();
}

}  // namespace

PackingResult packing_numbers(const DynamicalSystem& sys, double eps, int k,
                              std::size_t sample_budget, std::uint64_t seed) {
  if (!(eps > 0)) throw Error("packing_numbers: eps must be > 0");
  if (k < 1) throw Error("packing_numbers: k must be >= 1");
  if (sample_budget == 0) throw Error("packing_numbers: sample budget must be positive");
  PackingResult r;
  bool sat_cover = false;
  std::size_t used_cover = 0;
  r.separated = adaptive_packing(sys, eps, k, sample_budget, seed, r.candidates, r.saturated);
  r.cover = adaptive_packing(sys, eps / 2, k, sample_budget, seed ^ 0x9e3779b97f4a7c15ULL, used_cover, sat_cover);
  r.cover = std::max(r.cover, r.separated);
  r.saturated = r.saturated && sat_cover;
  return r;
}

EntropyEstimate htop_estimate(const DynamicalSystem& sys, const std::vector<double>& eps_grid,
                              int k_min, int k_max, std::size_t budget, std::uint64_t seed, Exec exec) {
  if (eps_grid.empty()) throw Error("htop_estimate: empty eps grid");
  if (k_min < 1 || k_max < k_min) throw Error("htop_estimate: bad k range");
  std::vector<double> eps = eps_grid;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  const int nk = k_max - k_min + 1;
  const std::size_t jobs = eps.size() * static_cast<std::size_t>(nk);
  std::vector<PackingResult> results(jobs);
  auto job = [&](std::size_t j) {
    const std::size_t e = j / static_cast<std::size_t>(nk);
    const int k = k_min + static_cast<int>(j % static_cast<std::size_t>(nk));
    Rng r(seed, "htop", j);
    results[j] = packing_numbers(sys, eps[e], k, budget, r.next());
  };
  if (exec == Exec::Parallel) {
    // Largest jobs first: the last k of the smallest ε dominates.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = static_cast<std::int64_t>(jobs) - 1; j >= 0; --j) job(static_cast<std::size_t>(j));
  } else {
    for (std::size_t j = 0; j < jobs; ++j) job(j);
  }

  EntropyEstimate est;
  est.k_min = k_min;
  est.k_max = k_max;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    EpsRate er;
    er.eps = eps[e];
    GrowthSeries s;
    bool unsaturated = false;
    for (int k = k_min; k <= k_max; ++k) {
      const auto& r = results[e * static_cast<std::size_t>(nk) + static_cast<std::size_t>(k - k_min)];
      s.index.push_back(k);
      s.counts.push_back(static_cast<double>(r.separated));
      er.separated.push_back(static_cast<double>(r.separated));
      er.cover.push_back(static_cast<double>(r.cover));
      if (r.separated > r.cover) er.bracket_ok = false;
      unsaturated = unsaturated || !r.saturated;
    }
    // C_2ε ≤ S_ε against the cover counts at 2ε when that ε is on the grid.
    // Both sides are random packings at the same scale, so 10% slack.
    for (std::size_t f = 0; f < e; ++f)
      if (eps[f] == 2 * eps[e])
        for (int i = 0; i < nk; ++i)
          if (est.per_eps[f].cover[static_cast<std::size_t>(i)] > 1.1 * er.separated[static_cast<std::size_t>(i)])
            er.bracket_ok = false;
    est.partial = est.partial || unsaturated;
    if (unsaturated)
      est.diagnostics.push_back(fmt::format("eps={}: candidate budget reached before saturation", format_real(eps[e])));
    if (!er.bracket_ok)
      est.diagnostics.push_back(fmt::format("eps={}: cover/packing bracket violated", format_real(eps[e])));
    try {
      er.fit = exp_growth_rate(s);
    } catch (const Error& err) {
      est.diagnostics.push_back(fmt::format("eps={}: degenerate fit: {}", format_real(eps[e]), err.what()));
    }
    est.per_eps.push_back(std::move(er));
  }
  for (std::size_t e = 1; e < est.per_eps.size(); ++e) {
    const auto& a = est.per_eps[e - 1].fit;
    const auto& b = est.per_eps[e].fit;
    if (b.value < a.value - (a.residual + b.residual + 0.02))
      est.diagnostics.push_back(fmt::format("rate decreases from eps={} to eps={}", format_real(est.per_eps[e - 1].eps),
                                            format_real(est.per_eps[e].eps)));
  }
  est.value = std::max(0.0, est.per_eps.back().fit.value);
  return est;
}

std::uint64_t linear_periodic_count(const Mat2& a, int k) {
  if (k < 1) throw Error("periodic count: k must be >= 1");
  const i128 d = det_minus_identity(a, k);
  if (d == 0) throw Error(fmt::format("infinite or non-isolated fixed set: A^{} - I is singular", k));
  const i128 ad = d < 0 ? -d : d;
  if (ad > static_cast<i128>(UINT64_MAX)) throw Error("periodic count exceeds 64 bits");
  return static_cast<std::uint64_t>(ad);
}

PeriodicCount periodic_count(const DynamicalSystem& sys, int k) {
  if (k < 1) throw Error("periodic count: k must be >= 1");
  PeriodicCount pc;
  switch (sys.kind()) {
    case SystemKind::CircleDegree: {
      i128 p = 1;
      for (int i = 0; i < k; ++i) p = checked_mul(p, sys.degree());
      const i128 c = p - 1;
      if (c == 0) throw Error("infinite or non-isolated fixed set: the map is the identity");
      const i128 ac = c < 0 ? -c : c;
      if (ac > static_cast<i128>(UINT64_MAX)) throw Error("periodic count exceeds 64 bits");
      pc.count = static_cast<std::uint64_t>(ac);
      return pc;
    }
    case SystemKind::Rotation: {
      const double t = k * sys.angle();
      if (t == std::floor(t))
        throw Error(fmt::format("infinite or non-isolated fixed set: rotation^{} is the identity", k));
      return pc;
    }
    case SystemKind::LinearTorus: pc.count = linear_periodic_count(sys.matrix(), k); return pc;
    case SystemKind::Shift: {
      i128 p = 1;
      for (int i = 0; i < k; ++i) p = checked_mul(p, sys.alphabet());
      if (p > static_cast<i128>(UINT64_MAX)) throw Error("periodic count exceeds 64 bits");
      pc.count = static_cast<std::uint64_t>(p);
      return pc;
    }
    case SystemKind::CustomCircle: {
      // Zeros of G(x) = F^k(x) − x modulo 1: integer levels crossed by G.
      const std::size_t n = 1 << 16;
      auto g = [&](double x) {
        std::array<double, 2> y{x, 0.0};
        for (int i = 0; i < k; ++i) y = sys.lift(y);
        return y[0] - x;
      };
      double prev = g(0.0);
      for (std::size_t i = 1; i <= n; ++i) {
        const double cur = g(static_cast<double>(i) / static_cast<double>(n));
        pc.count += static_cast<std::uint64_t>(std::abs(std::floor(cur) - std::floor(prev)));
        prev = cur;
      }
      pc.approximate = true;
      return pc;
    }
  }
  return pc;
}

double orbit_growth_entropy(const GrowthSeries& p) { return std::max(0.0, exp_growth_rate(p).value); }

namespace {

template <class Map>
double adaptive_length(std::array<double, 2> p, std::array<double, 2> q, Map f, double tol,
                       std::size_t& budget, bool& exhausted) {
  struct Piece {
    double t0, t1;
    std::array<double, 2> f0, f1;
  };
  auto at = [&](double t) { return f({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])}); };
  std::vector<Piece> stack{{0.0, 1.0, at(0.0), at(1.0)}};
  double total = 0;
  while (!stack.empty()) {
    Piece c = stack.back();
    stack.pop_back();
    const double tm = 0.5 * (c.t0 + c.t1);
    const auto fm = at(tm);
    const double err = std::hypot(fm[0] - 0.5 * (c.f0[0] + c.f1[0]), fm[1] - 0.5 * (c.f0[1] + c.f1[1]));
    if (err > tol && c.t1 - c.t0 > 1e-15) {
      if (budget == 0) {
        exhausted = true;
      } else {
        --budget;
        stack.push_back({tm, c.t1, fm, c.f1});
        stack.push_back({c.t0, tm, c.f0, fm});
        continue;
      }
    }
    total += std::hypot(fm[0] - c.f0[0], fm[1] - c.f0[1]) + std::hypot(c.f1[0] - fm[0], c.f1[1] - fm[1]);
  }
  return total;
}

VolumeGrowth fit_lengths(VolumeGrowth v) {
  try {
    v.fit = exp_growth_rate(v.lengths);
  } catch (const Error&) {
    v.fit.warnings.push_back("fewer than 4 usable points");
  }
  return v;
}

}  // namespace

VolumeGrowth volume_growth(const DynamicalSystem& sys, const std::vector<std::array<double, 2>>& curve,
                           int k_max, double tol, std::size_t budget) {
  if (sys.kind() == SystemKind::Shift) throw Error("volume growth is not defined on shift spaces");
  if (curve.size() < 2) throw Error("volume growth: curve needs at least 2 points");
  if (k_max < 0) throw Error("volume growth: k_max must be >= 0");
  VolumeGrowth v;
  for (int k = 0; k <= k_max; ++k) {
    auto fk = [&](std::array<double, 2> x) {
      if (sys.dim() == 1) x[1] = 0.0;
      for (int i = 0; i < k; ++i) x = sys.lift(x);
      return x;
    };
    double len = 0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i)
      len += adaptive_length(curve[i], curve[i + 1], fk, tol, budget, v.lower_bound);
    v.lengths.index.push_back(k);
    v.lengths.counts.push_back(len);
  }
  return fit_lengths(std::move(v));
}

VolumeGrowth graph_volume_growth(const DynamicalSystem& sys, int k_max, double tol, std::size_t budget) {
  if (sys.dim() != 1) throw Error("graph volume growth needs a circle map");
  VolumeGrowth v;
  for (int k = 0; k <= k_max; ++k) {
    auto gk = [&](std::array<double, 2> x) {
      std::array<double, 2> y{x[0], 0.0};
      for (int i = 0; i < k; ++i) y = sys.lift(y);
      return std::array<double, 2>{x[0], y[0]};
    };
    double len = 0;
    const int pieces = 1024;
    for (int i = 0; i < pieces; ++i)
      len += adaptive_length({double(i) / pieces, 0.0}, {double(i + 1) / pieces, 0.0}, gk, tol, budget,
                             v.lower_bound);
    v.lengths.index.push_back(k);
    v.lengths.counts.push_back(len);
  }
  return fit_lengths(std::move(v));
}

double pseudo_orbit_defect(const DynamicalSystem& sys, const std::vector<Point>& z) {
  double d = 0;
  for (std::size_t i = 0; i < z.size(); ++i) d = std::max(d, sys.distance(sys.apply(z[i]), z[(i + 1) % z.size()]));
  return d;
}

Shadow shadow_linear(const Mat2& a, const std::vector<Point>& z) {
  const std::size_t k = z.size();
  if (k == 0) throw Error("shadow_linear: empty pseudo-orbit");
  const double a00 = a[0][0], a01 = a[0][1], a10 = a[1][0], a11 = a[1][1];
  const double tr = a00 + a11, det = a00 * a11 - a01 * a10;
  const double disc = tr * tr - 4 * det;
  if (disc <= 0) throw Error("shadow_linear: matrix is not hyperbolic (complex or repeated eigenvalues)");
  const double mu[2] = {0.5 * (tr + std::sqrt(disc)), 0.5 * (tr - std::sqrt(disc))};
  for (double m : mu)
    if (std::abs(std::abs(m) - 1.0) < 1e-12) throw Error("shadow_linear: matrix is not hyperbolic");
  if (det_minus_identity(a, static_cast<int>(k)) == 0) throw Error("shadow_linear: A^k - I is singular");

  // Eigenvectors and the dual rows of V^{-1}.
  std::array<std::array<double, 2>, 2> v;
  for (int j = 0; j < 2; ++j) {
    std::array<double, 2> e = std::abs(a01) > std::abs(a10) ? std::array<double, 2>{a01, mu[j] - a00}
                                                            : std::array<double, 2>{mu[j] - a11, a10};
    if (e[0] == 0 && e[1] == 0) e = j == 0 ? std::array<double, 2>{1, 0} : std::array<double, 2>{0, 1};
    const double n = std::hypot(e[0], e[1]);
    v[j] = {e[0] / n, e[1] / n};
  }
  const double vd = v[0][0] * v[1][1] - v[1][0] * v[0][1];
  const std::array<std::array<double, 2>, 2> dual{{{v[1][1] / vd, -v[1][0] / vd}, {-v[0][1] / vd, v[0][0] / vd}}};

  std::vector<std::array<double, 2>> delta(k);
  DynamicalSystem sys = DynamicalSystem::linear_torus(a);
  for (std::size_t i = 0; i < k; ++i) {
    const auto l = sys.lift(z[i].x);
    for (int c = 0; c < 2; ++c) {
      const double d = l[c] - z[(i + 1) % k].x[c];
      delta[i][c] = d - std::round(d);
    }
  }
  std::vector<std::array<double, 2>> e(k, {0.0, 0.0});
  Shadow out;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> d(k);
    for (std::size_t i = 0; i < k; ++i) d[i] = dual[j][0] * delta[i][0] + dual[j][1] * delta[i][1];
    const double m = mu[j];
    const double kk = static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0;
      if (std::abs(m) > 1) {
        // e_i = −Σ_{j≥0} μ^{−j−1} d_{i+j}, summed around the cycle.
        double w = 1.0 / m;
        for (std::size_t t = 0; t < k; ++t, w /= m) s -= w * d[(i + t) % k];
        s /= 1.0 - std::pow(m, -kk);
      } else {
        // e_i = Σ_{j≥1} μ^{j−1} d_{i−j}.
        double w = 1.0;
        for (std::size_t t = 1; t <= k; ++t, w *= m) s += w * d[(i + k - t) % k];
        s /= 1.0 - std::pow(m, kk);
      }
      e[i][0] += s * v[j][0];
      e[i][1] += s * v[j][1];
    }
    const double proj = std::hypot(dual[j][0], dual[j][1]);  // ‖P_j‖ = |v_j|·|dual_j|
    out.constant += proj / std::abs(std::abs(m) - 1.0);
  }
  for (std::size_t i = 0; i < k; ++i) {
    Point w;
    w.x = {frac(z[i].x[0] + e[i][0]), frac(z[i].x[1] + e[i][1])};
    out.distance = std::max(out.distance, sys.distance(w, z[i]));
    out.orbit.push_back(w);
  }
  return out;
}

std::vector<Point> exact_periodic_orbit(const Mat2& a, int k, std::array<std::int64_t, 2> n) {
  const IMat p = mat_pow(a, k);
  const i128 b00 = p[0][0] - 1, b01 = p[0][1], b10 = p[1][0], b11 = p[1][1] - 1;
  i128 det = det_minus_identity(a, k);
  if (det == 0) throw Error("exact_periodic_orbit: A^k - I is singular");
  // x = adj(B) n / det, normalized to a positive denominator.
  i128 x0 = checked_add(checked_mul(b11, n[0]), -checked_mul(b01, n[1]));
  i128 x1 = checked_add(-checked_mul(b10, n[0]), checked_mul(b00, n[1]));
  if (det < 0) {
    det = -det;
    x0 = -x0;
    x1 = -x1;
  }
  auto mod = [&](i128 v) {
    v %= det;
    return v < 0 ? v + det : v;
  };
  std::array<i128, 2> q{mod(x0), mod(x1)};
  std::vector<Point> orbit;
  for (int i = 0; i < k; ++i) {
    Point pt;
    pt.x = {static_cast<double>(q[0]) / static_cast<double>(det), static_cast<double>(q[1]) / static_cast<double>(det)};
    orbit.push_back(pt);
    q = {mod(checked_add(checked_mul(a[0][0], q[0]), checked_mul(a[0][1], q[1]))),
         mod(checked_add(checked_mul(a[1][0], q[0]), checked_mul(a[1][1], q[1])))};
  }
  if (q[0] != mod(x0) || q[1] != mod(x1)) throw Error("exact_periodic_orbit: orbit failed to close");
  return orbit;
}

}  // namespace hbar
