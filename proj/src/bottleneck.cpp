#include "hbar/bottleneck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hbar {

namespace {

struct Interval {
  double a, b;
};

std::vector<Interval> expand(const Barcode& bc, bool infinite) {
  std::vector<Interval> out;
  for (const auto& bar : bc.bars())
    if (bar.infinite() == infinite)
      for (std::size_t k = 0; k < bar.multiplicity; ++k) out.push_back({bar.start, bar.end});
  return out;
}

double linf(const Interval& x, const Interval& y) {
  return std::max(std::abs(x.a - y.a), std::abs(x.b - y.b));
}

/// Kuhn's augmenting-path matching on a dense bipartite graph.
class Matching {
 public:
  explicit Matching(const std::vector<std::vector<char>>& adj)
      : adj_(adj), match_right_(adj.empty() ? 0 : adj[0].size(), -1) {}

  bool perfect() {
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      seen_.assign(match_right_.size(), 0);
      if (!augment(u)) return false;
    }
    return true;
  }

 private:
  bool augment(std::size_t u) {
    for (std::size_t v = 0; v < match_right_.size(); ++v) {
      if (!adj_[u][v] || seen_[v]) continue;
      seen_[v] = 1;
      if (match_right_[v] < 0 || augment(static_cast<std::size_t>(match_right_[v]))) {
        match_right_[v] = static_cast<long>(u);
        return true;
      }
    }
    return false;
  }

  const std::vector<std::vector<char>>& adj_;
  std::vector<long> match_right_;
  std::vector<char> seen_;
};

double finite_bottleneck(const std::vector<Interval>& x, const std::vector<Interval>& y) {
  const std::size_t n = x.size(), m = y.size(), size = n + m;
  if (size == 0) return 0.0;
  // Left: x bars then diagonal copies of y. Right: y bars then diagonal copies of x.
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) {
      if (i < n && j < m) cost[i][j] = linf(x[i], y[j]);
      else if (i < n) cost[i][j] = (j - m == i) ? (x[i].b - x[i].a) / 2 : kInf;
      else if (j < m) cost[i][j] = (i - n == j) ? (y[j].b - y[j].a) / 2 : kInf;
    }
  std::vector<double> candidates;
  for (const auto& row : cost)
    for (double c : row)
      if (c != kInf) candidates.push_back(c);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0, hi = candidates.size() - 1;
  std::vector<std::vector<char>> adj(size, std::vector<char>(size));
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) adj[i][j] = cost[i][j] <= candidates[mid];
    if (Matching(adj).perfect()) hi = mid;
    else lo = mid + 1;
  }
  return candidates[lo];
}

}  // namespace

double bottleneck_distance(const Barcode& a, const Barcode& b) {
  auto ia = expand(a, true), ib = expand(b, true);
  if (ia.size() != ib.size()) return kInf;
  auto by_start = [](const Interval& p, const Interval& q) { return p.a < q.a; };
  std::sort(ia.begin(), ia.end(), by_start);
  std::sort(ib.begin(), ib.end(), by_start);
  double d = 0.0;
  for (std::size_t k = 0; k < ia.size(); ++k) d = std::max(d, std::abs(ia[k].a - ib[k].a));
  return std::max(d, finite_bottleneck(expand(a, false), expand(b, false)));
}

}  // namespace hbar
