#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hbar/common.hpp"

namespace hbar {

/// A half-open bar (start, end]; end == +inf for essential classes.
struct Bar {
  double start = 0.0;
  double end = kInf;
  std::size_t multiplicity = 1;
  std::optional<int> degree;

  bool infinite() const { return end == kInf; }
  double length() const { return end - start; }
};

/// Multiset of bars, kept sorted by (start, end, degree) with equal bars
/// merged into one entry with summed multiplicity.
class Barcode {
 public:
  Barcode() = default;
  explicit Barcode(std::vector<Bar> bars);

  void add(double start, double end, std::size_t multiplicity = 1,
           std::optional<int> degree = std::nullopt);
  const std::vector<Bar>& bars() const { return bars_; }
  /// Sorted set of finite endpoints.
  std::vector<double> spectrum() const;
  std::size_t total() const;
  bool empty() const { return bars_.empty(); }
  /// Same multiset of (start, end, multiplicity), ignoring degree labels.
  bool same_intervals(const Barcode& other) const;
  bool operator==(const Barcode& other) const;

 private:
  void normalize();
  std::vector<Bar> bars_;
};

/// Number of bars (a, b] with a < s and b − a > eps, with multiplicity.
std::size_t barcode_function(const Barcode& b, double eps, double s = kInf);

/// Length of the longest finite bar; 0 when there is none.
double beta_max(const Barcode& b);

/// CSV with header start,end,multiplicity; infinite ends written as "inf".
std::string barcode_to_csv(const Barcode& b);
Barcode barcode_from_csv(const std::string& text);
std::string barcode_to_json(const Barcode& b);

/// Shortest round-trip decimal for a double ("inf" for +inf).
std::string format_real(double x);

}  // namespace hbar
