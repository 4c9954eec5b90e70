#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hbar/barcode.hpp"

namespace hbar {

struct Generator {
  std::string id;
  double action = 0.0;
  std::optional<int> degree;
};

/// Sorted list of generator indices: a chain with F2 coefficients.
using Chain = std::vector<int>;

/// A finite complex over F2 with a real filtration on its basis. The boundary
/// of generator i is boundary[i], a set of generator indices.
class FilteredComplexF2 {
 public:
  FilteredComplexF2() = default;
  FilteredComplexF2(std::vector<Generator> gens, std::vector<Chain> boundary);

  /// Adds a generator with the given boundary (indices of earlier or later
  /// generators; duplicates cancel mod 2). Returns its index.
  int add(Generator g, Chain boundary = {});

  std::size_t size() const { return gens_.size(); }
  const std::vector<Generator>& generators() const { return gens_; }
  const Generator& generator(int i) const { return gens_[i]; }
  const std::vector<Chain>& boundary() const { return boundary_; }
  const Chain& boundary(int i) const { return boundary_[i]; }
  double action(int i) const { return gens_[i].action; }
  void set_action(int i, double a) { gens_[i].action = a; }

  /// Throws Error naming the offending generator when the filtration is not
  /// monotone along the boundary or when ∂∘∂ ≠ 0.
  void validate() const;
  /// Max action over the support; -inf for the empty chain.
  double chain_action(const Chain& c) const;
  Chain apply_boundary(const Chain& c) const;

 private:
  std::vector<Generator> gens_;
  std::vector<Chain> boundary_;
};

/// Symmetric difference of two sorted chains.
Chain chain_add(const Chain& a, const Chain& b);

/// One pair ∂x = y of a singular value decomposition, by generator index of
/// the pivot entries: y has leading generator `birth`, x has `death`.
struct PersistencePair {
  int birth;
  int death;
};

/// Output of the column reduction: a singular value decomposition
/// {x_i, y_i, z_j} with ∂x_i = y_i and ∂z_j = 0, and the barcode it induces.
struct Reduction {
  std::vector<int> order;  // generator indices in processing order
  std::vector<PersistencePair> pairs;
  std::vector<int> essential;  // leading generator of each z_j
  std::vector<Chain> x, y, z;
  Barcode barcode;
};

/// Processing order: increasing action, ties by input position, with faces
/// forced ahead of cofaces of equal action.
std::vector<int> filtration_order(const FilteredComplexF2& c);

Reduction reduce_filtered_complex(const FilteredComplexF2& c);

/// Abstract simplicial complex given by vertex lists (vertices 0..n-1).
struct SimplicialComplex {
  std::vector<std::vector<int>> simplices;
};

/// Lower-star filtration: every simplex takes the max of its vertex values.
FilteredComplexF2 sublevel_filtration(const SimplicialComplex& k,
                                      const std::vector<double>& vertex_values);

/// Shifts every action by an independent uniform draw in [-bound, bound].
/// Generators involved in a monotonicity violation are redrawn, for at most
/// 1000 rounds.
FilteredComplexF2 perturb_actions(const FilteredComplexF2& c, double bound, std::uint64_t seed);

/// Largest |action shift| between two complexes with the same generators.
double max_action_shift(const FilteredComplexF2& a, const FilteredComplexF2& b);

}  // namespace hbar
