#pragma once

// Maximum-weight bipartite matching. Dense Kuhn-Munkres over each connected
// component of the (usually very sparse) candidate graph.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace corefeval {

struct WeightedEdge {
  std::size_t left;
  std::size_t right;
  double weight;
};

/// Dense solver: rows x cols matrix (row-major), returns the column assigned
/// to each row or -1. Only pairs with positive weight are reported.
inline std::vector<long> max_weight_assignment(const std::vector<double>& weights, std::size_t rows,
                                               std::size_t cols) {
  std::vector<long> result(rows, -1);
  if (rows == 0 || cols == 0) return result;
  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;  // n <= m
  const std::size_t m = transpose ? rows : cols;
  auto cost = [&](std::size_t i, std::size_t j) {
    return transpose ? -weights[j * cols + i] : -weights[i * cols + j];
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= m; ++j) {
    if (match[j] == 0) continue;
    const std::size_t i = match[j] - 1, c = j - 1;
    const std::size_t row = transpose ? c : i;
    const std::size_t col = transpose ? i : c;
    if (weights[row * cols + col] > 0.0) result[row] = static_cast<long>(col);
  }
  return result;
}

/// Sparse front end: splits the edge set into connected components and
/// solves each densely. Returns (left, right) pairs sorted by left index.
/// Edges with non-positive weight are ignored.
inline std::vector<std::pair<std::size_t, std::size_t>> max_weight_matching(std::size_t n_left, std::size_t n_right,
                                                                            const std::vector<WeightedEdge>& edges) {
  std::vector<std::size_t> parent(n_left + n_right);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges)
    if (e.weight > 0.0) parent[find(e.left)] = find(n_left + e.right);

  std::map<std::size_t, std::vector<const WeightedEdge*>> components;
  for (const auto& e : edges)
    if (e.weight > 0.0) components[find(e.left)].push_back(&e);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [root, comp] : components) {
    std::vector<std::size_t> lefts, rights;
    for (const auto* e : comp) {
      lefts.push_back(e->left);
      rights.push_back(e->right);
    }
    std::sort(lefts.begin(), lefts.end());
    lefts.erase(std::unique(lefts.begin(), lefts.end()), lefts.end());
    std::sort(rights.begin(), rights.end());
    rights.erase(std::unique(rights.begin(), rights.end()), rights.end());
    auto index_of = [](const std::vector<std::size_t>& v, std::size_t x) {
      return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };
    std::vector<double> w(lefts.size() * rights.size(), 0.0);
    for (const auto* e : comp) {
      auto& cell = w[index_of(lefts, e->left) * rights.size() + index_of(rights, e->right)];
      cell = std::max(cell, e->weight);
    }
    const auto assigned = max_weight_assignment(w, lefts.size(), rights.size());
    for (std::size_t i = 0; i < lefts.size(); ++i)
      if (assigned[i] >= 0) pairs.emplace_back(lefts[i], rights[static_cast<std::size_t>(assigned[i])]);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace corefeval
