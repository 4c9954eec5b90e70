#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hbar/common.hpp"

namespace hbar {

/// Element of the Novikov field over F2 with finitely many terms: a strictly
/// increasing list of exponents, each with coefficient 1. Zero is empty.
class NovikovScalar {
 public:
  NovikovScalar() = default;
  /// Duplicate exponents cancel in pairs.
  explicit NovikovScalar(std::vector<double> exponents);
  static NovikovScalar monomial(double a) { return NovikovScalar({a}); }

  const std::vector<double>& exponents() const { return e_; }
  bool is_zero() const { return e_.empty(); }
  /// Least exponent; +inf for zero.
  double valuation() const { return e_.empty() ? kInf : e_.front(); }
  double max_exponent() const { return e_.empty() ? -kInf : e_.back(); }
  /// Multiplication by T^a.
  NovikovScalar shifted(double a) const;
  /// Drops every term with exponent >= cut.
  NovikovScalar truncated(double cut) const;

  NovikovScalar& operator+=(const NovikovScalar& o);
  friend NovikovScalar operator+(NovikovScalar a, const NovikovScalar& b) { return a += b; }
  friend NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b);
  bool operator==(const NovikovScalar& o) const = default;

 private:
  std::vector<double> e_;
};

double novikov_valuation(const NovikovScalar& x);

struct NovikovGenerator {
  std::string id;
  double action = 0.0;
};

/// Λ-combination of generators, indexed by generator position.
using NovikovChain = std::vector<NovikovScalar>;

/// Filtered complex over Λ. entry(i, j) is λ_ij in ∂x_i = Σ_j λ_ij x_j.
class NovikovComplex {
 public:
  NovikovComplex() = default;
  explicit NovikovComplex(std::vector<NovikovGenerator> gens);

  std::size_t size() const { return gens_.size(); }
  const std::vector<NovikovGenerator>& generators() const { return gens_; }
  double action(std::size_t i) const { return gens_[i].action; }
  const NovikovScalar& entry(std::size_t i, std::size_t j) const { return d_[i * size() + j]; }
  void set_entry(std::size_t i, std::size_t j, NovikovScalar v) { d_[i * size() + j] = std::move(v); }
  /// Adds v to λ_ij.
  void add_entry(std::size_t i, std::size_t j, const NovikovScalar& v) { d_[i * size() + j] += v; }
  std::size_t term_count() const;

  /// Throws Error naming the generators when a term fails strict action
  /// decrease or when ∂∘∂ ≠ 0.
  void validate() const;
  NovikovChain apply_boundary(const NovikovChain& c) const;

 private:
  std::vector<NovikovGenerator> gens_;
  std::vector<NovikovScalar> d_;
};

/// max_i A(x_i) − ν(λ_i); throws on the zero chain.
double chain_action(const NovikovChain& c, const NovikovComplex& cx);

/// Lengths of finite bars (ascending) and the number of infinite bars.
struct UnpinnedBarcode {
  std::vector<double> lengths;
  std::size_t infinite = 0;

  std::size_t total() const { return lengths.size() + infinite; }
  bool operator==(const UnpinnedBarcode&) const = default;
};

/// Number of bars of length strictly greater than eps, infinite ones included.
std::size_t b_eps_unpinned(const UnpinnedBarcode& b, double eps);
std::string unpinned_to_csv(const UnpinnedBarcode& b);

/// Selects among pivots of minimal valuation: the first in column-major
/// scan order, or the last. Both must give the same barcode.
enum class PivotRule { First, Last };

/// Singular value decomposition {x_i, y_i, z_j}: ∂x_i = y_i, ∂z_j = 0, and
/// the whole family is orthogonal for the action filtration.
struct NovikovSvd {
  std::vector<NovikovChain> x, y, z;
  UnpinnedBarcode barcode;
};

NovikovSvd orthogonalize(const NovikovComplex& c, PivotRule rule = PivotRule::First);
/// Barcode only, with exponents truncated at a cutoff above every possible
/// bar length so that intermediate entries stay small.
UnpinnedBarcode unpinned_barcode(const NovikovComplex& c, PivotRule rule = PivotRule::First);
/// Same, always on exponent lists. unpinned_barcode switches to bit-packed
/// polynomials in t = T^q when every arrow length is a multiple of a dyadic q.
UnpinnedBarcode unpinned_barcode_generic(const NovikovComplex& c,
                                         PivotRule rule = PivotRule::First);

struct FloerArrow {
  std::size_t from, to;
  double exponent;
  double length;
};

struct FloerGraph {
  std::vector<NovikovGenerator> vertices;
  std::vector<FloerArrow> arrows;
};

FloerGraph floer_graph(const NovikovComplex& c);

/// Vertices whose incident arrows all have length > eps.
std::vector<std::size_t> isolated_vertices(const FloerGraph& g, double eps);

NovikovComplex dual_complex(const NovikovComplex& c);
NovikovComplex tensor_product(const NovikovComplex& a, const NovikovComplex& b);

/// Random valid complex: a direct sum of pairs and cycles with dyadic
/// actions and arrow lengths, conjugated by `ops` filtered elementary basis
/// changes. Vertices listed in `planted` only receive arrows longer than eps.
struct NovikovRandomSpec {
  std::size_t generators = 8;
  std::size_t ops = 8;
  std::size_t planted = 0;
  double eps = 1.0;
};

struct PlantedComplex {
  NovikovComplex complex;
  std::vector<std::size_t> planted;
};

PlantedComplex random_novikov_complex(Rng& rng, const NovikovRandomSpec& spec);

/// Complex in standard form: one pair per finite length and one cycle per
/// infinite bar.
NovikovComplex standard_complex(const std::vector<double>& lengths, std::size_t infinite);

}  // namespace hbar
