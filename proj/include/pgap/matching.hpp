#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pgap {

/// Left side = bins, right side = arrival vertices (or compressed copies).
struct WeightedBipartite {
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  std::vector<double> weight;  // row-major left x right

  WeightedBipartite() = default;
  WeightedBipartite(std::size_t left, std::size_t right) : left_count(left), right_count(right), weight(left * right, 0.0) {}

  double& at(std::size_t u, std::size_t j) { return weight[u * right_count + j]; }
  double at(std::size_t u, std::size_t j) const { return weight[u * right_count + j]; }
};

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (u, j), sorted by u
  double total_weight = 0.0;
};

namespace detail {

// Kuhn-Munkres with potentials on a rows <= cols cost matrix (minimization).
// Returns, for each row, its assigned column.
inline std::vector<std::size_t> hungarian_min(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pu(rows + 1, 0.0), pv(cols + 1, 0.0), minv(cols + 1);
  std::vector<std::size_t> owner(cols + 1, 0), way(cols + 1, 0);
  std::vector<char> used(cols + 1);
  for (std::size_t i = 1; i <= rows; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * cols + (j - 1)] - pu[i0] - pv[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          pu[owner[j]] += delta;
          pv[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assign(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j)
    if (owner[j] != 0) assign[owner[j] - 1] = j - 1;
  return assign;
}

}  // namespace detail

/// Maximum-weight bipartite matching. Pairs with zero weight are dropped,
/// which does not change the value. Deterministic for a given input.
inline Matching max_weight_matching(const WeightedBipartite& g) {
  if (g.weight.size() != g.left_count * g.right_count) throw std::invalid_argument("weight matrix has wrong size");
  for (double w : g.weight)
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and >= 0");
  Matching out;
  if (g.left_count == 0 || g.right_count == 0) return out;
  const bool transpose = g.left_count > g.right_count;
  const std::size_t rows = transpose ? g.right_count : g.left_count;
  const std::size_t cols = transpose ? g.left_count : g.right_count;
  std::vector<double> cost(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) cost[r * cols + c] = -(transpose ? g.at(c, r) : g.at(r, c));
  const auto assign = detail::hungarian_min(cost, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t u = transpose ? assign[r] : r;
    const std::size_t j = transpose ? r : assign[r];
    const double w = g.at(u, j);
    if (w > 0.0) {
      out.pairs.emplace_back(u, j);
      out.total_weight += w;
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

inline std::optional<std::size_t> matched_partner(const Matching& m, std::size_t j) {
  for (const auto& [u, jj] : m.pairs)
    if (jj == j) return u;
  return std::nullopt;
}

/// Optimal matching between bins and a multiset of types, where each type v
/// occurs counts[v] times. Only min(counts[v], bins) copies of a type can ever
/// be matched, so the graph is built over that many copies.
/// Returns, per type, the sorted list of bins matched to some copy of it.
struct TypeMatching {
  std::vector<std::vector<std::size_t>> bins_of_type;
  double total_weight = 0.0;
};

inline TypeMatching match_type_counts(const std::vector<std::vector<double>>& weights,
                                      const std::vector<std::size_t>& counts) {
  const std::size_t m = weights.size();
  TypeMatching out;
  out.bins_of_type.resize(counts.size());
  std::vector<std::size_t> copy_type;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    bool useful = false;
    for (std::size_t u = 0; u < m; ++u) useful = useful || weights[u][v] > 0.0;
    if (!useful) continue;
    for (std::size_t k = 0; k < std::min(counts[v], m); ++k) copy_type.push_back(v);
  }
  WeightedBipartite g(m, copy_type.size());
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t j = 0; j < copy_type.size(); ++j) g.at(u, j) = weights[u][copy_type[j]];
  const Matching mm = max_weight_matching(g);
  for (const auto& [u, j] : mm.pairs) out.bins_of_type[copy_type[j]].push_back(u);
  for (auto& b : out.bins_of_type) std::sort(b.begin(), b.end());
  out.total_weight = mm.total_weight;
  return out;
}

}  // namespace pgap
