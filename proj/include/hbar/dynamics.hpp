#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hbar/common.hpp"
#include "hbar/growth.hpp"

namespace hbar {

using Mat2 = std::array<std::array<std::int64_t, 2>, 2>;

/// A point of the circle R/Z (x[0]), the torus R²/Z² (x[0], x[1]), or the
/// full shift (a symbol window whose position 0 sits at `center`).
struct Point {
  std::array<double, 2> x{0.0, 0.0};
  std::vector<std::uint8_t> word;
  std::size_t center = 0;
};

enum class SystemKind { CircleDegree, Rotation, CustomCircle, LinearTorus, Shift };

/// A self-map of the circle, the flat torus, or a full shift, with exact
/// structure where available.
class DynamicalSystem {
 public:
  /// x ↦ m·x mod 1.
  static DynamicalSystem circle_degree(int m);
  static DynamicalSystem rotation(double alpha);
  /// Lift F(x) = m·x + p(x), p 1-periodic and linear between table[i] at i/N.
  static DynamicalSystem custom_circle(int m, std::vector<double> table);
  static DynamicalSystem linear_torus(const Mat2& a);
  static DynamicalSystem shift(int alphabet);

  SystemKind kind() const { return kind_; }
  std::string name() const;
  /// 1 for circle maps, 2 for the torus, 0 for shifts.
  int dim() const;
  int degree() const { return m_; }
  double angle() const { return alpha_; }
  const Mat2& matrix() const { return a_; }
  int alphabet() const { return alphabet_; }
  /// The same system iterated m times (circle degree and linear maps only).
  DynamicalSystem power(int m) const;

  Point apply(const Point& p) const;
  double distance(const Point& p, const Point& q) const;
  /// Lift to R or R² (circle and torus only).
  std::array<double, 2> lift(const std::array<double, 2>& x) const;
  /// Lipschitz constant of the lift, for defect bounds.
  double lipschitz() const;
  /// Uniform random point; shift windows are sized for k iterations.
  Point random_point(Rng& rng, int k) const;

 private:
  SystemKind kind_ = SystemKind::CircleDegree;
  int m_ = 2;
  double alpha_ = 0.0;
  std::vector<double> table_;
  Mat2 a_{};
  int alphabet_ = 2;
};

/// max over 0 ≤ i < k of d(φ^i x, φ^i y).
double dk_distance(const DynamicalSystem& sys, const Point& x, const Point& y, int k);

/// Greedy ε-separated set in the d_k metric over a deterministic candidate
/// grid plus seeded random candidates. The candidate count doubles until the
/// count grows by less than 1% or the budget is reached.
struct PackingResult {
  std::size_t separated = 0;  // lower estimate of S_ε(k)
  std::size_t cover = 0;      // greedy ε/2-packing: upper estimate of C_ε(k)
  std::size_t candidates = 0;
  bool saturated = false;
};

PackingResult packing_numbers(const DynamicalSystem& sys, double eps, int k,
                              std::size_t sample_budget, std::uint64_t seed);

struct EpsRate {
  double eps = 0.0;
  RateFit fit;
  std::vector<double> separated;  // S_ε(k) along the k range
  std::vector<double> cover;
  bool bracket_ok = true;  // C_2ε ≤ S_ε ≤ C_ε wherever both are present
};

struct EntropyEstimate {
  double value = 0.0;  // rate at the smallest ε, base 2, clamped at 0
  std::vector<EpsRate> per_eps;  // ordered by decreasing ε
  int k_min = 1, k_max = 1;
  bool partial = false;  // some packing hit the budget before saturating
  std::vector<std::string> diagnostics;
};

/// Per-(ε, k) packing counts run in parallel; every count uses its own
/// named random substream, so Serial and Parallel agree exactly.
EntropyEstimate htop_estimate(const DynamicalSystem& sys, const std::vector<double>& eps_grid,
                              int k_min, int k_max, std::size_t budget, std::uint64_t seed,
                              Exec exec = Exec::Parallel);

/// Number of isolated periodic points of period k (fixed points of φ^k).
/// Exact for circle-degree, linear-torus and shift systems. Custom circle
/// maps use a sign-change scan and set `approximate`. Rotations and linear
/// maps with A^k − I singular are rejected.
struct PeriodicCount {
  std::uint64_t count = 0;
  bool approximate = false;
};

PeriodicCount periodic_count(const DynamicalSystem& sys, int k);

/// Base-2 growth rate of a periodic-point series via the tail fit.
double orbit_growth_entropy(const GrowthSeries& p);

/// Length of φ^k(curve) for k in [0, k_max]. Segments are split while the
/// image of the midpoint strays from the image chord by more than `tol`.
/// In graph mode (circle maps) the curve is the graph of φ^k over [0, 1).
struct VolumeGrowth {
  GrowthSeries lengths;
  RateFit fit;
  bool lower_bound = false;  // refinement budget ran out
};

VolumeGrowth volume_growth(const DynamicalSystem& sys, const std::vector<std::array<double, 2>>& curve,
                           int k_max, double tol = 1e-9, std::size_t budget = 1 << 22);
VolumeGrowth graph_volume_growth(const DynamicalSystem& sys, int k_max, double tol = 1e-9,
                                 std::size_t budget = 1 << 22);

/// max_i d(φ(z_i), z_{i+1}), cyclically.
double pseudo_orbit_defect(const DynamicalSystem& sys, const std::vector<Point>& z);

/// True k-periodic orbit of a hyperbolic linear torus map near a cyclic
/// pseudo-orbit z, from the cyclic geometric sums along the stable and
/// unstable eigenlines. `constant` bounds sup_i d(z_i, w_i) / defect.
struct Shadow {
  std::vector<Point> orbit;
  double constant = 0.0;
  double distance = 0.0;
};

Shadow shadow_linear(const Mat2& a, const std::vector<Point>& z);

/// Exact orbit of a k-periodic point of a linear torus map: the point
/// (A^k − I)^{-1} n mod 1 for the integer vector n, computed in rational
/// arithmetic with denominator |det(A^k − I)|.
std::vector<Point> exact_periodic_orbit(const Mat2& a, int k, std::array<std::int64_t, 2> n);

/// |det(A^k − I)| with overflow checks; throws when A^k − I is singular.
std::uint64_t linear_periodic_count(const Mat2& a, int k);

}  // namespace hbar
