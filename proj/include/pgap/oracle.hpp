#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pgap/arrivals.hpp"
#include "pgap/instance.hpp"
#include "pgap/lp.hpp"
#include "pgap/matching.hpp"

namespace pgap {

/// Number of online arrivals per type in [0, T).
struct RealizedDemandSet {
  std::vector<std::size_t> counts;

  static RealizedDemandSet from_trace(const ArrivalTrace& trace, std::size_t num_types) {
    return {online_counts(trace, num_types)};
  }
  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

inline double offline_opt_matching(const GapInstance& inst, const RealizedDemandSet& realized) {
  if (!inst.is_matching()) throw std::invalid_argument("offline_opt_matching needs a matching instance");
  if (realized.counts.size() != inst.num_types()) throw std::invalid_argument("count vector has wrong length");
  return match_type_counts(inst.weight_matrix(), realized.counts).total_weight;
}

/// Relaxation of the offline integer program: x_uv in [0, n_v] continuous,
/// sum_u x_uv <= n_v, capacity rows per bin and dimension.
inline double lp_upper_bound_gap(const GapInstance& inst, const RealizedDemandSet& realized) {
  if (realized.counts.size() != inst.num_types()) throw std::invalid_argument("count vector has wrong length");
  const std::size_t m = inst.num_bins(), n = inst.num_types(), D = inst.dim();
  LinearProgram lp;
  std::vector<std::vector<LinearProgram::Term>> type_rows(n);
  std::vector<std::vector<LinearProgram::Term>> cap_rows(m * D);
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (realized.counts[v] == 0 || inst.weight(u, v) <= 0.0) continue;
      const std::size_t k = lp.add_variable(inst.weight(u, v), 0.0, kInf);
      type_rows[v].push_back({k, 1.0});
      auto r = inst.demand(u, v);
      for (std::size_t d = 0; d < D; ++d)
        if (r[d] != 0.0) cap_rows[u * D + d].push_back({k, r[d]});
    }
  if (lp.num_vars() == 0) return 0.0;
  for (std::size_t v = 0; v < n; ++v)
    if (!type_rows[v].empty())
      lp.add_constraint(std::move(type_rows[v]), Relation::LessEqual, static_cast<double>(realized.counts[v]));
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t d = 0; d < D; ++d)
      if (!cap_rows[u * D + d].empty())
        lp.add_constraint(std::move(cap_rows[u * D + d]), Relation::LessEqual, inst.capacity(u, d));
  const LpSolution sol = solve(lp);
  if (!sol.optimal()) throw InvariantViolation("relaxation of the offline program is not optimal");
  return sol.objective_value;
}

struct GapOptResult {
  double value = 0.0;
  bool upper_bound_only = false;  // true when `value` is the LP relaxation
  std::size_t nodes = 0;
};

struct GapOptLimits {
  std::size_t max_items = 25;
  std::size_t max_nodes = 20000;
};

namespace detail {

// Depth-first branch-and-bound over per-item bin choices. Items are grouped
// by type; copies of a type are identical, so they take non-decreasing bin
// indices and a reject ends the run of that type.
class GapBranchAndBound {
 public:
  GapBranchAndBound(const GapInstance& inst, const RealizedDemandSet& realized, std::size_t max_nodes)
      : inst_(inst), max_nodes_(max_nodes), residual_(inst.capacity_matrix()) {
    for (std::size_t v = 0; v < realized.counts.size(); ++v)
      for (std::size_t c = 0; c < realized.counts[v]; ++c) items_.push_back(v);
    remaining_.assign(inst.num_types(), 0);
    for (std::size_t v : items_) ++remaining_[v];
  }

  GapOptResult run() {
    best_ = greedy_value();
    search(0, 0, 0.0);
    return {best_, aborted_, nodes_};
  }

 private:
  double greedy_value() const {
    auto res = residual_;
    double total = 0.0;
    for (std::size_t v : items_) {
      std::size_t pick = inst_.num_bins();
      for (std::size_t u = 0; u < inst_.num_bins(); ++u) {
        if (inst_.weight(u, v) > 0.0 && inst_.fits(res[u], u, v) &&
            (pick == inst_.num_bins() || inst_.weight(u, v) > inst_.weight(pick, v)))
          pick = u;
      }
      if (pick == inst_.num_bins()) continue;
      auto r = inst_.demand(pick, v);
      for (std::size_t d = 0; d < r.size(); ++d) res[pick][d] -= r[d];
      total += inst_.weight(pick, v);
    }
    return total;
  }

  // Sum over remaining items of the best weight among bins they still fit.
  double cheap_bound(std::size_t v_now, std::size_t min_bin) const {
    double b = 0.0;
    for (std::size_t v = 0; v < remaining_.size(); ++v) {
      if (remaining_[v] == 0) continue;
      double w = 0.0;
      for (std::size_t u = (v == v_now ? min_bin : 0); u < inst_.num_bins(); ++u)
        if (inst_.fits(residual_[u], u, v)) w = std::max(w, inst_.weight(u, v));
      b += w * static_cast<double>(remaining_[v]);
    }
    return b;
  }

  double lp_bound(std::size_t v_now, std::size_t min_bin) const {
    const std::size_t m = inst_.num_bins(), n = inst_.num_types(), D = inst_.dim();
    LinearProgram lp;
    std::vector<std::vector<LinearProgram::Term>> type_rows(n), cap_rows(m * D);
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = 0; v < n; ++v) {
        if (remaining_[v] == 0 || inst_.weight(u, v) <= 0.0 || !inst_.fits(residual_[u], u, v)) continue;
        if (v == v_now && u < min_bin) continue;
        const std::size_t k = lp.add_variable(inst_.weight(u, v), 0.0, copies_that_fit(u, v));
        type_rows[v].push_back({k, 1.0});
        auto r = inst_.demand(u, v);
        for (std::size_t d = 0; d < D; ++d)
          if (r[d] != 0.0) cap_rows[u * D + d].push_back({k, r[d]});
      }
    if (lp.num_vars() == 0) return 0.0;
    for (std::size_t v = 0; v < n; ++v)
      if (!type_rows[v].empty())
        lp.add_constraint(std::move(type_rows[v]), Relation::LessEqual, static_cast<double>(remaining_[v]));
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t d = 0; d < D; ++d)
        if (!cap_rows[u * D + d].empty())
          lp.add_constraint(std::move(cap_rows[u * D + d]), Relation::LessEqual, std::max(0.0, residual_[u][d]));
    const LpSolution sol = solve(lp);
    return sol.optimal() ? sol.objective_value : kInf;
  }

  // Largest integral number of type-v items bin u can still take, capped by
  // the remaining count. Returned as +inf when that cap is not binding.
  double copies_that_fit(std::size_t u, std::size_t v) const {
    double c = static_cast<double>(remaining_[v]);
    auto r = inst_.demand(u, v);
    for (std::size_t d = 0; d < r.size(); ++d)
      if (r[d] > 0.0) c = std::min(c, std::floor((residual_[u][d] + kTol) / r[d]));
    return c >= static_cast<double>(remaining_[v]) ? kInf : c;
  }

  bool pruned(double bound, double value) const { return value + bound <= best_ + 1e-9 * (1.0 + best_); }

  void search(std::size_t k, std::size_t min_bin, double value) {
    if (aborted_) return;
    if (k == items_.size()) {
      best_ = std::max(best_, value);
      return;
    }
    if (++nodes_ > max_nodes_) {
      aborted_ = true;
      return;
    }
    const std::size_t v = items_[k];
    if (pruned(cheap_bound(v, min_bin), value)) return;
    if (items_.size() - k > 1 && pruned(lp_bound(v, min_bin), value)) return;

    const bool same_run_next = k + 1 < items_.size() && items_[k + 1] == v;
    --remaining_[v];
    for (std::size_t u = min_bin; u < inst_.num_bins(); ++u) {
      const double w = inst_.weight(u, v);
      if (w <= 0.0 || !inst_.fits(residual_[u], u, v)) continue;
      const std::vector<double> saved = residual_[u];
      auto r = inst_.demand(u, v);
      for (std::size_t d = 0; d < r.size(); ++d) residual_[u][d] -= r[d];
      search(k + 1, same_run_next ? u : 0, value + w);
      residual_[u] = saved;
      if (aborted_) break;
    }
    // Reject this copy and every later copy of the same type.
    std::size_t next = k + 1;
    while (next < items_.size() && items_[next] == v) ++next;
    const std::size_t dropped = next - k - 1;
    remaining_[v] -= dropped;
    if (!aborted_) search(next, 0, value);
    remaining_[v] += dropped + 1;
  }

  const GapInstance& inst_;
  std::size_t max_nodes_;
  std::vector<std::vector<double>> residual_;
  std::vector<std::size_t> items_;
  std::vector<std::size_t> remaining_;
  double best_ = 0.0;
  std::size_t nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace detail

/// Exact offline optimum of the GAP integer program for realized counts.
/// Beyond the item or node budget the LP relaxation value is returned and
/// flagged.
inline GapOptResult offline_opt_gap(const GapInstance& inst, const RealizedDemandSet& realized,
                                    GapOptLimits limits = {}) {
  if (realized.counts.size() != inst.num_types()) throw std::invalid_argument("count vector has wrong length");
  if (realized.total() > limits.max_items) return {lp_upper_bound_gap(inst, realized), true, 0};
  detail::GapBranchAndBound bb(inst, realized, limits.max_nodes);
  GapOptResult r = bb.run();
  if (r.upper_bound_only) r.value = lp_upper_bound_gap(inst, realized);
  return r;
}

/// Offline optimum for any instance: Hungarian for matching instances,
/// branch-and-bound otherwise.
inline GapOptResult offline_opt(const GapInstance& inst, const RealizedDemandSet& realized, GapOptLimits limits = {}) {
  if (inst.is_matching()) return {offline_opt_matching(inst, realized), false, 0};
  return offline_opt_gap(inst, realized, limits);
}

}  // namespace pgap
