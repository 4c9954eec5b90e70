#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hbar/common.hpp"

namespace hbar {

/// Plane R², flat torus R²/Z², or cylinder T*S¹ = (R/2πZ) × R with
/// coordinates (θ, p).
enum class ModelSpace { Plane, Torus, Cylinder };

/// A curve given by its lift: consecutive points joined by straight
/// segments. Closed curves on the torus or cylinder end at the start point
/// plus a period vector.
using Polyline = std::vector<P2>;

double polyline_length(const Polyline& c);
/// Period lattice generators of the model space (empty for the plane).
std::vector<P2> periods(ModelSpace s);

/// |a ∩ b| in the model space. Tangencies and vertex contacts count as the
/// proper crossings of a and b + (δ, δ²) for infinitesimal δ > 0.
/// Overlapping collinear segments throw "non-transverse family member".
std::size_t curve_intersections(ModelSpace space, const Polyline& a, const Polyline& b);

/// A family ξ ↦ L_ξ over a parameter box or ball with Lebesgue measure.
/// L_ξ is the polyline through psi(ξ, x) at the knots x ∈ [0, 1].
struct Tomograph {
  std::string name;
  ModelSpace space = ModelSpace::Plane;
  int dim = 2;
  bool ball = false;
  double radius = 0.0;             // ball case
  std::vector<double> lo, hi;      // box case
  std::vector<double> knots;       // increasing, from 0 to 1
  std::function<P2(const std::vector<double>& xi, double x)> psi;
  /// Window for density grids: [x0, x1] × [y0, y1].
  std::array<double, 4> region{};

  double measure() const;
  std::vector<double> sample(Rng& rng) const;
  Polyline curve(const std::vector<double>& xi) const;
};

/// Lines {y : ⟨y, n(θ)⟩ = p}, p ∈ [−r, r], θ ∈ [0, π), as segments of
/// half-length 2r centred at p·n(θ).
Tomograph line_tomograph(double r);
/// L_ξ = L_0 + ξ for ξ in the disk of radius r, on the flat torus.
Tomograph translation_tomograph(const Polyline& core, double r);
/// L_ξ = graph of f_ξ′ on the cylinder, f_ξ = Σ ξ_j g_j with g = cos θ,
/// sin θ, cos 2θ, sin 2θ, ...; ξ in the d-ball of radius r.
Tomograph cylinder_graph_tomograph(int d, double r, int segments = 256);

/// Push-forward 1-density on a grid of cells × tangent-angle bins:
/// W[cell][b] accumulates |∂_xΨ|·dξ·dx per unit area for tangents in bin b,
/// so d(y; v) = Σ_b W[cell(y)][b]·|det(v, u_b)|.
class Density2D {
 public:
  Density2D(ModelSpace space, std::array<double, 4> region, int nx, int ny, int na);

  double operator()(const P2& y, const P2& v) const;
  /// Σ_b W[cell(y)][b]: the fiber volume at y, bounding d(y; v)/|v|.
  double fiber_volume(const P2& y) const;
  double max_fiber_volume() const;
  /// ∫ over the curve of d(y; tangent).
  double integrate(const Polyline& c) const;

  void accumulate(const P2& y, const P2& tangent, double weight);
  void merge(const Density2D& other);
  void scale(double s);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int na() const { return na_; }

 private:
  long cell(P2 y) const;
  ModelSpace space_;
  std::array<double, 4> region_;
  int nx_, ny_, na_;
  std::vector<double> w_;
};

/// Fraction of sampled (ξ, x) where DΨ has rank 2.
double submersion_rate(const Tomograph& t, std::size_t samples, std::uint64_t seed);

Density2D pushforward_density(const Tomograph& t, int resolution, std::size_t samples,
                              std::uint64_t seed, Exec exec = Exec::Parallel);

struct CroftonReport {
  double integral = 0.0;  // ∫_B N dξ
  double std_error = 0.0;
  double constant = 0.0;  // max fiber volume
  double volume = 0.0;    // length of the target
  std::size_t samples = 0;
  std::size_t rejected = 0;  // non-transverse parameters resampled
  bool pass = false;         // integral ≤ constant·volume + 3·stderr
};

/// Monte Carlo over fixed-size shards, each with its own random substream,
/// summed in shard order: Serial and Parallel agree bit for bit.
CroftonReport crofton_mc(const Tomograph& t, const Polyline& target, std::size_t samples,
                         std::uint64_t seed, Exec exec = Exec::Parallel);

struct FormulaCheck {
  double mc = 0.0, mc_stderr = 0.0;
  double density = 0.0, density_stderr = 0.0;
  double z = 0.0;  // |mc − density| / combined standard error
  bool pass = false;
};

/// ∫_B N dξ against ∫_{target} d_Ψ; the density error comes from 16
/// independent batches.
FormulaCheck crofton_formula_check(const Tomograph& t, const Polyline& target, std::size_t samples,
                                   int resolution, std::uint64_t seed, Exec exec = Exec::Parallel);

Polyline regular_polygon(P2 centre, double radius, int sides);
std::string polyline_to_csv(const Polyline& c);
Polyline polyline_from_csv(const std::string& text);

}  // namespace hbar
