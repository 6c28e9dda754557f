#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pgap/instance.hpp"
#include "pgap/lp.hpp"

namespace pgap {

/// (bin, column) pair carried by one LP variable. `column` is an item type
/// for the rate-based programs and an arrival vertex for the per-vertex one.
struct Edge {
  std::size_t bin;
  std::size_t column;
};

/// An LP together with the edge each of its variables stands for.
struct EdgeLp {
  LinearProgram program;
  std::vector<Edge> edges;

  /// Scatters a solution back into a bins x columns matrix.
  std::vector<std::vector<double>> to_matrix(const std::vector<double>& values, std::size_t bins,
                                             std::size_t columns) const {
    std::vector<std::vector<double>> out(bins, std::vector<double>(columns, 0.0));
    if (values.empty()) return out;
    for (std::size_t k = 0; k < edges.size(); ++k) out[edges[k].bin][edges[k].column] = values[k];
    return out;
  }
};

using Matrix = std::vector<std::vector<double>>;
using Mask = std::vector<std::vector<bool>>;

namespace detail {

inline void require_shape(const Matrix& w, std::size_t cols) {
  for (const auto& row : w)
    if (row.size() != cols) throw std::invalid_argument("weight matrix is not bins x types");
}

// Per-column "sum over bins <= cap[col]" and per-bin "sum over columns <= bin_cap".
inline void add_column_caps(EdgeLp& out, std::size_t columns, const std::vector<double>& cap) {
  std::vector<std::vector<LinearProgram::Term>> rows(columns);
  for (std::size_t k = 0; k < out.edges.size(); ++k) rows[out.edges[k].column].push_back({k, 1.0});
  for (std::size_t c = 0; c < columns; ++c)
    if (!rows[c].empty()) out.program.add_constraint(std::move(rows[c]), Relation::LessEqual, cap[c]);
}

inline void add_bin_counts(EdgeLp& out, std::size_t bins, double bin_cap) {
  std::vector<std::vector<LinearProgram::Term>> rows(bins);
  for (std::size_t k = 0; k < out.edges.size(); ++k) rows[out.edges[k].bin].push_back({k, 1.0});
  for (std::size_t u = 0; u < bins; ++u)
    if (!rows[u].empty()) out.program.add_constraint(std::move(rows[u]), Relation::LessEqual, bin_cap);
}

// sum_col r[u][type(col)][d] * y <= cap[u][d]
template <class TypeOf>
void add_knapsack_rows(EdgeLp& out, const std::vector<std::vector<std::vector<double>>>& demands, const Matrix& cap,
                       TypeOf type_of) {
  for (std::size_t u = 0; u < cap.size(); ++u) {
    for (std::size_t d = 0; d < cap[u].size(); ++d) {
      std::vector<LinearProgram::Term> terms;
      for (std::size_t k = 0; k < out.edges.size(); ++k) {
        if (out.edges[k].bin != u) continue;
        const double r = demands[u][type_of(out.edges[k].column)][d];
        if (r != 0.0) terms.push_back({k, r});
      }
      if (!terms.empty()) out.program.add_constraint(std::move(terms), Relation::LessEqual, cap[u][d]);
    }
  }
}

}  // namespace detail

/// Matching LP: max sum w x, sum_u x_uv <= lambda_v T, sum_v x_uv <= 1, x in [0,1].
inline EdgeLp build_lp_matching(const std::vector<double>& lambda_hat, double horizon, const Matrix& weights) {
  detail::require_shape(weights, lambda_hat.size());
  EdgeLp out;
  for (std::size_t u = 0; u < weights.size(); ++u)
    for (std::size_t v = 0; v < lambda_hat.size(); ++v) {
      out.program.add_variable(weights[u][v], 0.0, 1.0);
      out.edges.push_back({u, v});
    }
  std::vector<double> cap(lambda_hat.size());
  for (std::size_t v = 0; v < cap.size(); ++v) cap[v] = lambda_hat[v] * horizon;
  detail::add_column_caps(out, lambda_hat.size(), cap);
  detail::add_bin_counts(out, weights.size(), 1.0);
  return out;
}

/// Heavy-edge LP: as the matching LP restricted to heavy edges, with each bin
/// allowed up to `dim` heavy items.
inline EdgeLp build_lp_heavy(const std::vector<double>& lambda_hat, double horizon, const Matrix& weights,
                             const Mask& heavy_mask, std::size_t dim) {
  detail::require_shape(weights, lambda_hat.size());
  EdgeLp out;
  for (std::size_t u = 0; u < weights.size(); ++u)
    for (std::size_t v = 0; v < lambda_hat.size(); ++v) {
      if (!heavy_mask[u][v]) continue;
      out.program.add_variable(weights[u][v], 0.0, 1.0);
      out.edges.push_back({u, v});
    }
  std::vector<double> cap(lambda_hat.size());
  for (std::size_t v = 0; v < cap.size(); ++v) cap[v] = lambda_hat[v] * horizon;
  detail::add_column_caps(out, lambda_hat.size(), cap);
  detail::add_bin_counts(out, weights.size(), static_cast<double>(dim));
  return out;
}

/// Light-edge rate LP over the residual capacity:
/// sum_u y_uv <= lambda_v T, sum_v r^d_uv y_uv <= residual[u][d], y >= 0.
inline EdgeLp build_lp_light0(const std::vector<double>& lambda_hat, double horizon, const Matrix& residual,
                              const Matrix& weights, const std::vector<std::vector<std::vector<double>>>& demands,
                              const Mask& light_mask) {
  detail::require_shape(weights, lambda_hat.size());
  for (const auto& row : residual)
    for (double c : row)
      if (c < 0.0) throw std::invalid_argument("residual capacity must be >= 0");
  EdgeLp out;
  for (std::size_t u = 0; u < weights.size(); ++u)
    for (std::size_t v = 0; v < lambda_hat.size(); ++v) {
      if (!light_mask[u][v]) continue;
      out.program.add_variable(weights[u][v], 0.0, kInf);
      out.edges.push_back({u, v});
    }
  std::vector<double> cap(lambda_hat.size());
  for (std::size_t v = 0; v < cap.size(); ++v) cap[v] = lambda_hat[v] * horizon;
  detail::add_column_caps(out, lambda_hat.size(), cap);
  detail::add_knapsack_rows(out, demands, residual, [](std::size_t v) { return v; });
  return out;
}

/// Per-vertex light LP over an arrival multiset (`vertices[j]` is the type of
/// vertex j): sum_u y_uj <= 1, sum_j r^d y_uj <= C^d_u (total capacity), y in [0,1].
inline EdgeLp build_lp_light1(const std::vector<std::size_t>& vertices, const Matrix& weights,
                              const std::vector<std::vector<std::vector<double>>>& demands, const Matrix& capacities,
                              const Mask& light_mask) {
  EdgeLp out;
  for (std::size_t u = 0; u < weights.size(); ++u)
    for (std::size_t j = 0; j < vertices.size(); ++j) {
      if (!light_mask[u][vertices[j]]) continue;
      out.program.add_variable(weights[u][vertices[j]], 0.0, 1.0);
      out.edges.push_back({u, j});
    }
  detail::add_column_caps(out, vertices.size(), std::vector<double>(vertices.size(), 1.0));
  detail::add_knapsack_rows(out, demands, capacities, [&](std::size_t j) { return vertices[j]; });
  return out;
}

/// Type-aggregated form of the per-vertex light LP. With k_v copies of type v,
/// z_uv = sum of y over the copies; sum_u z_uv <= k_v and the capacity rows are
/// unchanged. Any optimum z yields the per-vertex optimum y_uj = z_uv / k_v,
/// so the two programs have equal value.
inline EdgeLp build_lp_light1_aggregated(const std::vector<std::size_t>& type_counts, const Matrix& weights,
                                         const std::vector<std::vector<std::vector<double>>>& demands,
                                         const Matrix& capacities, const Mask& light_mask) {
  detail::require_shape(weights, type_counts.size());
  EdgeLp out;
  for (std::size_t u = 0; u < weights.size(); ++u)
    for (std::size_t v = 0; v < type_counts.size(); ++v) {
      if (!light_mask[u][v] || type_counts[v] == 0) continue;
      out.program.add_variable(weights[u][v], 0.0, kInf);
      out.edges.push_back({u, v});
    }
  std::vector<double> cap(type_counts.begin(), type_counts.end());
  detail::add_column_caps(out, type_counts.size(), cap);
  detail::add_knapsack_rows(out, demands, capacities, [](std::size_t v) { return v; });
  return out;
}

}  // namespace pgap
