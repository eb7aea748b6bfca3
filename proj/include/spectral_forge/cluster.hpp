#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "spectral_forge/matrix.hpp"

namespace spectral_forge {

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Groups points whose pairwise distance chains stay within `radius`
/// (single linkage). Groups are returned with ascending member indices,
/// ordered by their smallest member.
inline std::vector<std::vector<std::size_t>> cluster_points(std::span<const Complex> points,
                                                            double radius) {
  const std::size_t m = points.size();
  detail::DisjointSets sets(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::abs(points[i] - points[j]) <= radius) sets.unite(i, j);

  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == m) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

/// Permutation sorting points lexicographically by (Re, Im). Real parts
/// closer than `radius` along a chain count as equal, so rounding noise in
/// Re cannot flip the order of points that differ only in Im.
inline std::vector<std::size_t> lexicographic_order(std::span<const Complex> points, double radius) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].real() < points[b].real();
  });
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() &&
           points[order[end]].real() - points[order[end - 1]].real() <= radius)
      ++end;
    std::stable_sort(order.begin() + start, order.begin() + end, [&](std::size_t a, std::size_t b) {
      return points[a].imag() < points[b].imag();
    });
    start = end;
  }
  return order;
}

}  // namespace spectral_forge
