#pragma once

// Independent reference implementations used only by the tests. They share
// no code with the library beyond plain types.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace oracle {

/// Dense rate matrix rates[i][j] = lambda_ij.
struct Rates {
  std::size_t n = 0;
  std::vector<std::vector<double>> gossip;
  std::vector<double> source;
  double lambda_e = 1.0;
};

/// L x L torus, lambda/4 per neighbor, lambda/n from the source.
inline Rates torus2d(std::size_t L, double lambda = 1.0, double lambda_e = 1.0) {
  Rates r;
  r.n = L * L;
  r.gossip.assign(r.n, std::vector<double>(r.n, 0.0));
  r.source.assign(r.n, lambda / static_cast<double>(r.n));
  r.lambda_e = lambda_e;
  for (std::size_t row = 0; row < L; ++row) {
    for (std::size_t col = 0; col < L; ++col) {
      const std::size_t i = row * L + col;
      const std::size_t nbrs[4] = {((row + 1) % L) * L + col, ((row + L - 1) % L) * L + col,
                                   row * L + (col + 1) % L, row * L + (col + L - 1) % L};
      for (std::size_t j : nbrs) r.gossip[i][j] += lambda / 4.0;
    }
  }
  return r;
}

/// Path 0 - 1 - ... - n-1 with lambda/2 per existing neighbor.
inline Rates line(std::size_t n, double lambda = 1.0, double lambda_e = 1.0) {
  Rates r;
  r.n = n;
  r.gossip.assign(n, std::vector<double>(n, 0.0));
  r.source.assign(n, lambda / static_cast<double>(n));
  r.lambda_e = lambda_e;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    r.gossip[i][i + 1] = lambda / 2.0;
    r.gossip[i + 1][i] = lambda / 2.0;
  }
  return r;
}

inline bool adjacent(const Rates& r, std::size_t i, std::size_t j) {
  return r.gossip[i][j] > 0.0 || r.gossip[j][i] > 0.0;
}

/// Connectivity of the induced subgraph by depth-first search.
inline bool connected(const Rates& r, std::uint64_t mask) {
  if (mask == 0) return false;
  std::size_t start = 0;
  while (!((mask >> start) & 1)) ++start;
  std::uint64_t seen = std::uint64_t{1} << start;
  std::vector<std::size_t> stack{start};
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < r.n; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if ((mask & bit) && !(seen & bit) && adjacent(r, u, v)) {
        seen |= bit;
        stack.push_back(v);
      }
    }
  }
  return seen == mask;
}

/// v_S straight from the recursion definition, memoized by mask.
class AgeRecursion {
 public:
  explicit AgeRecursion(const Rates& r) : r_(r) {}

  double operator()(std::uint64_t s) {
    if (auto it = memo_.find(s); it != memo_.end()) return it->second;
    double num = r_.lambda_e, den = 0.0;
    for (std::size_t i = 0; i < r_.n; ++i) {
      if ((s >> i) & 1) den += r_.source[i];
    }
    for (std::size_t i = 0; i < r_.n; ++i) {
      if ((s >> i) & 1) continue;
      double into = 0.0;
      for (std::size_t j = 0; j < r_.n; ++j) {
        if ((s >> j) & 1) into += r_.gossip[i][j];
      }
      if (into == 0.0) continue;
      num += into * (*this)(s | (std::uint64_t{1} << i));
      den += into;
    }
    return memo_[s] = num / den;
  }

 private:
  const Rates& r_;
  std::map<std::uint64_t, double> memo_;
};

/// Ring ages by arc length: v_j = (lambda_e + lambda v_{j+1}) / (j lambda / n + lambda),
/// v_n = lambda_e / lambda. Index j - 1.
inline std::vector<double> ring_ages(std::size_t n, double lambda_e = 1.0, double lambda = 1.0) {
  std::vector<double> v(n);
  v[n - 1] = lambda_e / lambda;
  for (std::size_t j = n - 1; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    v[j - 1] = (lambda_e + lambda * v[j]) / (jd * lambda / static_cast<double>(n) + lambda);
  }
  return v;
}

/// Number of links entering `mask` on the dense rate structure.
inline std::size_t incoming_links(const Rates& r, std::uint64_t mask) {
  std::size_t e = 0;
  for (std::size_t i = 0; i < r.n; ++i) {
    if ((mask >> i) & 1) continue;
    for (std::size_t j = 0; j < r.n; ++j) {
      if (((mask >> j) & 1) && r.gossip[i][j] > 0.0) ++e;
    }
  }
  return e;
}

/// All connected sets of size <= max_size containing node 0, grown level by
/// level with explicit deduplication.
inline std::vector<std::set<std::uint64_t>> rooted_connected_sets(const Rates& r,
                                                                  std::size_t max_size) {
  std::vector<std::set<std::uint64_t>> levels(max_size + 1);
  levels[1].insert(1);
  for (std::size_t k = 1; k < max_size; ++k) {
    for (std::uint64_t m : levels[k]) {
      for (std::size_t u = 0; u < r.n; ++u) {
        if (!((m >> u) & 1)) continue;
        for (std::size_t v = 0; v < r.n; ++v) {
          if (!((m >> v) & 1) && adjacent(r, u, v)) levels[k + 1].insert(m | (std::uint64_t{1} << v));
        }
      }
    }
  }
  return levels;
}

/// Minimum incoming-link count over connected size-j subsets of a small
/// network by scanning every mask.
inline std::size_t min_incoming_bruteforce(const Rates& r, std::size_t j) {
  std::size_t best = SIZE_MAX;
  const std::uint64_t limit = std::uint64_t{1} << r.n;
  for (std::uint64_t m = 1; m < limit; ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) != j) continue;
    if (!connected(r, m)) continue;
    best = std::min(best, incoming_links(r, m));
  }
  return best;
}

}  // namespace oracle
