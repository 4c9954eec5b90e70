#pragma once

#include <string>
#include <vector>

#include "hbar/barcode.hpp"
#include "hbar/novikov.hpp"

namespace hbar {

/// Nonnegative counts on a strictly increasing index (time k or action s).
struct GrowthSeries {
  std::vector<double> index;
  std::vector<double> counts;

  void validate() const;
  std::size_t size() const { return index.size(); }
};

std::string growth_to_csv(const GrowthSeries& s, const std::string& index_name = "k");
GrowthSeries growth_from_csv(const std::string& text);

/// A least-squares slope over a tail window [lo, hi) of the series.
struct RateFit {
  double value = 0.0;  // base-2 rate, or polynomial degree
  std::size_t lo = 0, hi = 0;
  double residual = 0.0;  // RMS of the fit in log2 units
  std::size_t points = 0;
  std::vector<std::string> warnings;
};

/// Slope of log2(count) against index over the points with index at or above
/// the midpoint of the range. Zero counts are dropped; an all-zero tail gives
/// rate 0; fewer than 4 usable points is an error.
RateFit exp_growth_rate(const GrowthSeries& s);

/// Slope of log2(count) against log2(index) over the same tail. Needs at
/// least 6 points; nonpositive counts or indices in the tail are dropped
/// with a warning.
RateFit poly_degree_fit(const GrowthSeries& s);

/// Least-squares slope of count against index over the whole series; the
/// residual is RMS in count units.
RateFit linear_fit(const GrowthSeries& s);

/// count ≤ C_n·index^n + C_0, with C_0 the first count and C_n the largest
/// count/index^n over the first half of the range. The certificate passes
/// iff the bound then holds on the whole range, so a series growing faster
/// than degree n fails.
struct Certificate {
  int degree = 0;
  double c_n = 0.0, c_0 = 0.0;
  bool pass = false;
  double worst_ratio = 0.0;  // max of count / bound over the range
  std::size_t violations = 0;
};

Certificate toric_bound_check(const GrowthSeries& s, int n);

/// Per-ε exponential rates of b_ε along a family of barcodes. The reported
/// value is the rate at the smallest ε, clamped below at 0.
struct BarcodeEntropy {
  std::vector<double> eps;
  std::vector<RateFit> rates;
  double value = 0.0;
  bool monotone = true;
  std::string convention = "value is the fitted rate at the smallest eps";
};

BarcodeEntropy barcode_entropy_estimate(const std::vector<double>& index,
                                        const std::vector<Barcode>& family,
                                        const std::vector<double>& eps_grid);
BarcodeEntropy barcode_entropy_estimate(const std::vector<double>& index,
                                        const std::vector<UnpinnedBarcode>& family,
                                        const std::vector<double>& eps_grid);
/// Same, from precomputed series (one per ε, aligned with eps_grid).
BarcodeEntropy barcode_entropy_from_series(const std::vector<GrowthSeries>& series,
                                           const std::vector<double>& eps_grid);

}  // namespace hbar
