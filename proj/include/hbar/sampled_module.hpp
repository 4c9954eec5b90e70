#pragma once

#include <vector>

#include "hbar/barcode.hpp"
#include "hbar/f2.hpp"
#include "hbar/filtered_complex.hpp"

namespace hbar {

/// A persistence module over F2 sampled on a sorted grid t_0 < ... < t_m.
/// The module is assumed constant on each cell (t_{i-1}, t_i], zero below
/// t_0, and constant above t_m. maps[i] is π from t_i to t_{i+1}.
class SampledModule {
 public:
  SampledModule(std::vector<double> grid, std::vector<std::size_t> dims,
                std::vector<f2::Matrix> maps);

  const std::vector<double>& grid() const { return grid_; }
  std::size_t dim(std::size_t i) const { return dims_[i]; }
  const f2::Matrix& adjacent_map(std::size_t i) const { return maps_[i]; }
  /// Structure map from grid index i to grid index j >= i, as a composite.
  f2::Matrix map(std::size_t i, std::size_t j) const;

  /// Grid index of the cell containing points just below x (smallest grid
  /// point >= x), and just above x (smallest grid point > x).
  std::size_t cell_below(double x) const;
  std::size_t cell_above(double x) const;

 private:
  std::vector<double> grid_;
  std::vector<std::size_t> dims_;
  std::vector<f2::Matrix> maps_;
};

/// Sublevel homology H(C_{<t}) of a complex on a grid of all its actions,
/// the midpoints between them, and one point on each side.
SampledModule sample_module(const FilteredComplexF2& c);
/// Same, on a caller-supplied grid.
SampledModule sample_module(const FilteredComplexF2& c, std::vector<double> grid);
/// Structure map between two grid points computed directly from cycle
/// representatives, without composing adjacent maps.
f2::Matrix direct_structure_map(const FilteredComplexF2& c, const std::vector<double>& grid,
                                std::size_t i, std::size_t j);

/// Interval module F_(a,b] sampled on a grid.
SampledModule interval_module(double a, double b, std::vector<double> grid);
SampledModule direct_sum(const SampledModule& u, const SampledModule& v);

/// Multiplicity n_I of the interval I = (a, b] (b may be +inf), computed as
/// dim A/(B+C) from images and kernels of structure maps at the grid point c.
std::size_t barcode_multiplicity(const SampledModule& m, double a, double b, double c);

/// Barcode recovered purely from multiplicities over all candidate intervals
/// with endpoints on the given values.
Barcode barcode_from_multiplicities(const SampledModule& m, const std::vector<double>& endpoints);

}  // namespace hbar
