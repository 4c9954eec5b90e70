#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hbar/barcode.hpp"
#include "hbar/common.hpp"
#include "hbar/growth.hpp"

namespace hbar {

/// A convex function on an interval (dim 1) or a rectangle (dim 2), with
/// analytic gradient and Hessian (hxx, hxy, hyy).
struct ConvexProfile {
  std::string name;
  int dim = 1;
  std::array<double, 4> domain{0.0, 1.0, 0.0, 0.0};  // x0, x1 [, y0, y1]
  std::function<double(const P2&)> h;
  std::function<P2(const P2&)> grad;
  std::function<std::array<double, 3>(const P2&)> hess;

  /// Hessian ≥ 0 on a 1000-point grid per axis; throws on failure.
  void check_convex() const;
};

/// h(x) = c·x^p on [lo, hi] ⊂ [0, ∞), p ≥ 1.
ConvexProfile power_profile(double c, double p, double lo = 0.0, double hi = 1.0);
/// h(x) = Σ c_i x^i.
ConvexProfile poly_profile(std::vector<double> coeffs, double lo = 0.0, double hi = 1.0);
/// h′ linear between the given values at equally spaced knots, h(lo) = 0.
ConvexProfile table_profile(std::vector<double> slopes, double lo = 0.0, double hi = 1.0);
/// h(x, y) = Σ c[i][j] x^i y^j on a rectangle.
ConvexProfile poly2_profile(std::vector<std::vector<double>> coeffs, std::array<double, 4> rect);

/// Rational tori of level k on one face F of the domain: points w in the
/// relative interior of F with ∇(h|_F)(w) ∈ (1/k)·Z^{dim F}. `count` assigns
/// ties on ∂F to the lower-dimensional face; `closed` keeps them.
struct FaceCount {
  std::string face;
  int dim = 0;
  std::size_t count = 0;
  std::size_t closed = 0;
  std::vector<P2> points;
};

struct ToriCount {
  std::vector<FaceCount> faces;
  std::size_t total = 0;  // Σ count over faces
  /// Closed count on the top face: lattice points of the closed gradient image.
  std::size_t interior_closed = 0;
};

ToriCount rational_tori_count(const ConvexProfile& h, int k);

/// Σ_F 2^{dim F}·closed_F: each rational torus splits into 2^{dim F}
/// non-degenerate fixed points; ties are counted on every face they touch.
std::size_t fixed_point_bound(const ConvexProfile& h, int k);

struct EllipsoidSpec {
  std::vector<double> a;
  void validate() const;
  /// No ratio a_i/a_j is within 1e-12 of a fraction with denominator ≤ 10^6.
  bool rationally_independent() const;
};

struct EllipsoidSpectrum {
  std::vector<double> actions;  // {m·a_i ≤ s : m ≥ 1}, sorted
  std::size_t generator_count = 0;
};

EllipsoidSpectrum ellipsoid_spectrum(const EllipsoidSpec& e, double s);
GrowthSeries ellipsoid_counts(const EllipsoidSpec& e, const std::vector<double>& s_grid);

/// h on [1, r_max] with h(1) = 0, h′ ≥ 0, h″ ≥ 0, extended linearly with
/// slope h′(r_max).
struct SemiAdmissibleProfile {
  std::string name;
  double r_max = 2.0;
  std::function<double(double)> h, dh, d2h;

  double slope() const { return dh(r_max); }
  /// A_h(r) = r·h′(r) − h(r).
  double action(double r) const { return r * dh(r) - h(r); }
  /// Sampled at 10^4 points: h(1) = 0, h′, h″ ≥ 0 and A_h nondecreasing.
  void validate() const;
};

/// h(r) = c·(r − 1)^p, p > 1.
SemiAdmissibleProfile semi_admissible_power(double c, double p, double r_max);

struct OrbitLevel {
  double r_star = 0.0;
  double action = 0.0;
};

/// Solves h′(r_*) = T by bisection to 1e-12.
OrbitLevel reeb_orbit_level(const SemiAdmissibleProfile& p, double T);

struct LatticeBasis {
  P2 v1{1.0, 0.0}, v2{0.0, 1.0};
  double det() const { return v1[0] * v2[1] - v1[1] * v2[0]; }
  void validate() const;
};

/// Energies ℓ² = |m v1 + n v2|² < s over nonzero classes (m, n), sorted.
std::vector<double> flat_torus_energies(const LatticeBasis& b, double s);
/// Each nonzero class of energy E < s gives infinite bars at E in degrees 0
/// and 1; the constant loops give the homology of T² at 0 (4 bars).
Barcode flat_torus_loop_barcode(const LatticeBasis& b, double s);
GrowthSeries flat_torus_counts(const LatticeBasis& b, const std::vector<double>& s_grid);

}  // namespace hbar
