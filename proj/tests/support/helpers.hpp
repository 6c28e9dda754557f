#pragma once

#include <vector>

#include "pgap/matching.hpp"
#include "support/oracles.hpp"
#include "pgap/policy.hpp"

namespace helpers {

inline std::vector<long> bins_of(const pgap::AllocationLog& log) {
  std::vector<long> out;
  for (const auto& d : log.decisions) out.push_back(d.bin);
  return out;
}

// Offline optimum of a matching instance on one trace, via the uncompressed graph.
inline double matching_opt(const pgap::GapInstance& inst, const pgap::ArrivalTrace& tr) {
  std::vector<std::size_t> cols;
  for (std::size_t k = tr.first_online(); k < tr.events.size(); ++k) cols.push_back(tr.events[k].type);
  pgap::WeightedBipartite g(inst.num_bins(), cols.size());
  for (std::size_t u = 0; u < inst.num_bins(); ++u)
    for (std::size_t j = 0; j < cols.size(); ++j) g.at(u, j) = inst.weight(u, cols[j]);
  return pgap::max_weight_matching(g).total_weight;
}

// Exhaustive GAP optimum over a list of item types.
inline double gap_opt_bruteforce(const pgap::GapInstance& inst, const std::vector<std::size_t>& items) {
  const std::size_t m = inst.num_bins();
  std::vector<std::vector<double>> w(m, std::vector<double>(items.size()));
  std::vector<std::vector<std::vector<double>>> r(m, std::vector<std::vector<double>>(items.size()));
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t k = 0; k < items.size(); ++k) {
      w[u][k] = inst.weight(u, items[k]);
      auto d = inst.demand(u, items[k]);
      r[u][k].assign(d.begin(), d.end());
    }
  return oracle::brute_force_gap(w, r, inst.capacity_matrix());
}

inline std::vector<std::size_t> online_items(const pgap::ArrivalTrace& tr) {
  std::vector<std::size_t> out;
  for (std::size_t k = tr.first_online(); k < tr.events.size(); ++k) out.push_back(tr.events[k].type);
  return out;
}

}  // namespace helpers
