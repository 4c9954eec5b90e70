#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace hbar::f2 {

/// Dense vector over F2 packed into 64-bit words.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  bool any() const;
  /// Highest set index, or nullopt for the zero vector.
  std::optional<std::size_t> top() const;
  Vec& operator^=(const Vec& o);
  bool operator==(const Vec& o) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

/// A linear map stored as its columns (images of the domain basis).
struct Matrix {
  std::size_t rows = 0;
  std::vector<Vec> cols;

  std::size_t domain_dim() const { return cols.size(); }
  Vec apply(const Vec& x) const;
  static Matrix identity(std::size_t n);
  static Matrix zero(std::size_t rows, std::size_t cols);
};

/// this ∘ rhs
Matrix compose(const Matrix& lhs, const Matrix& rhs);

/// Row-echelon basis of a subspace, keyed by the highest set bit. Each stored
/// row carries a tag vector recording which inserted vectors it combines.
class Echelon {
 public:
  explicit Echelon(std::size_t ambient, std::size_t tags = 0)
      : ambient_(ambient), tags_(tags), pivot_(ambient, -1) {}

  /// Inserts v (with its tag). Returns false if v was already in the span.
  bool insert(Vec v, Vec tag = {});
  /// Reduces v against the basis. Returns the tag combination used, and
  /// leaves the residual in v.
  Vec reduce(Vec& v) const;
  bool contains(Vec v) const;
  std::size_t dim() const { return rows_.size(); }
  const std::vector<Vec>& rows() const { return rows_; }

 private:
  std::size_t ambient_;
  std::size_t tags_;
  std::vector<long> pivot_;
  std::vector<Vec> rows_;
  std::vector<Vec> row_tags_;
};

std::size_t rank(const std::vector<Vec>& vs, std::size_t ambient);
/// Basis of {x : M x = 0}.
std::vector<Vec> kernel(const Matrix& m);
/// Basis of the column span.
std::vector<Vec> image(const Matrix& m);
/// Basis of U ∩ W inside a common ambient space.
std::vector<Vec> intersect(const std::vector<Vec>& u, const std::vector<Vec>& w,
                           std::size_t ambient);

}  // namespace hbar::f2
