#include "hbar/f2.hpp"

#include <bit>

#include "hbar/common.hpp"

namespace hbar::f2 {

bool Vec::any() const {
  for (auto w : w_)
    if (w) return true;
  return false;
}

std::optional<std::size_t> Vec::top() const {
  for (std::size_t k = w_.size(); k-- > 0;)
    if (w_[k]) return k * 64 + 63 - static_cast<std::size_t>(std::countl_zero(w_[k]));
  return std::nullopt;
}

Vec& Vec::operator^=(const Vec& o) {
  if (o.n_ != n_) throw Error("f2::Vec: size mismatch");
  for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
  return *this;
}

Vec Matrix::apply(const Vec& x) const {
  Vec out(rows);
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (x.get(j)) out ^= cols[j];
  return out;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m{n, {}};
  for (std::size_t j = 0; j < n; ++j) {
    Vec c(n);
    c.set(j);
    m.cols.push_back(std::move(c));
  }
  return m;
}

Matrix Matrix::zero(std::size_t rows, std::size_t cols) {
  return Matrix{rows, std::vector<Vec>(cols, Vec(rows))};
}

Matrix compose(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.domain_dim() != rhs.rows) throw Error("f2::compose: dimension mismatch");
  Matrix out{lhs.rows, {}};
  out.cols.reserve(rhs.cols.size());
  for (const auto& c : rhs.cols) out.cols.push_back(lhs.apply(c));
  return out;
}

bool Echelon::insert(Vec v, Vec tag) {
  if (tags_ && tag.size() == 0) tag = Vec(tags_);
  for (auto t = v.top(); t; t = v.top()) {
    const long p = pivot_[*t];
    if (p < 0) {
      pivot_[*t] = static_cast<long>(rows_.size());
      rows_.push_back(std::move(v));
      row_tags_.push_back(std::move(tag));
      return true;
    }
    v ^= rows_[p];
    if (tags_) tag ^= row_tags_[p];
  }
  return false;
}

Vec Echelon::reduce(Vec& v) const {
  Vec tag(tags_);
  for (auto t = v.top(); t; t = v.top()) {
    const long p = pivot_[*t];
    if (p < 0) break;
    v ^= rows_[p];
    if (tags_) tag ^= row_tags_[p];
  }
  return tag;
}

bool Echelon::contains(Vec v) const {
  // Reduce fully: stop only when the top bit has no pivot.
  for (auto t = v.top(); t; t = v.top()) {
    const long p = pivot_[*t];
    if (p < 0) return false;
    v ^= rows_[p];
  }
  return true;
}

std::size_t rank(const std::vector<Vec>& vs, std::size_t ambient) {
  Echelon e(ambient);
  for (const auto& v : vs) e.insert(v);
  return e.dim();
}

std::vector<Vec> kernel(const Matrix& m) {
  const std::size_t n = m.domain_dim();
  Echelon e(m.rows, n);
  std::vector<Vec> out;
  for (std::size_t j = 0; j < n; ++j) {
    Vec tag(n);
    tag.set(j);
    Vec v = m.cols[j];
    Vec used = e.reduce(v);
    if (!v.any()) {
      used ^= tag;
      out.push_back(std::move(used));
    } else {
      used ^= tag;
      e.insert(std::move(v), std::move(used));
    }
  }
  return out;
}

std::vector<Vec> image(const Matrix& m) {
  Echelon e(m.rows);
  for (const auto& c : m.cols) e.insert(c);
  return e.rows();
}

std::vector<Vec> intersect(const std::vector<Vec>& u, const std::vector<Vec>& w,
                           std::size_t ambient) {
  // Null vectors (a, b) of [U | W] give Σ a_i u_i = Σ b_j w_j in U ∩ W.
  Matrix stacked{ambient, {}};
  for (const auto& x : u) stacked.cols.push_back(x);
  for (const auto& x : w) stacked.cols.push_back(x);
  Echelon result(ambient);
  for (const auto& nv : kernel(stacked)) {
    Vec x(ambient);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (nv.get(i)) x ^= u[i];
    result.insert(std::move(x));
  }
  return result.rows();
}

}  // namespace hbar::f2
