#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pgap/bounds.hpp"
#include "pgap/policy_matching.hpp"

namespace pgap {

namespace detail {

// Light max phase: solve the light LP over V' and read the current arrival's
// row. The type-aggregated program is used; y_u = z_uv / k_v is an optimal
// per-vertex solution that treats copies of a type symmetrically.
class LightMaxSampler {
 public:
  LightMaxSampler(const GapInstance& inst, Mask light)
      : weights_(inst.weight_matrix()),
        demands_(inst.demand_tensor()),
        capacities_(inst.capacity_matrix()),
        light_(std::move(light)) {}

  std::optional<std::size_t> draw(const std::vector<std::size_t>& counts, std::size_t v, double uniform) {
    auto it = cache_.find(counts);
    if (it == cache_.end()) {
      if (cache_.size() > 4096) cache_.clear();
      it = cache_.emplace(counts, solve_rows(counts)).first;
    }
    return draw_bin(it->second[v], uniform);
  }

 private:
  std::vector<std::vector<double>> solve_rows(const std::vector<std::size_t>& counts) const {
    const std::size_t m = weights_.size(), n = counts.size();
    std::vector<std::vector<double>> rows(n, std::vector<double>(m, 0.0));
    const EdgeLp lp = build_lp_light1_aggregated(counts, weights_, demands_, capacities_, light_);
    if (lp.edges.empty()) return rows;
    const LpSolution sol = solve(lp.program);
    if (!sol.optimal()) throw InvariantViolation(std::string("light LP not optimal: ") + to_string(sol.status));
    for (std::size_t k = 0; k < lp.edges.size(); ++k) {
      const auto [u, v] = lp.edges[k];
      rows[v][u] = std::clamp(sol.values[k] / static_cast<double>(counts[v]), 0.0, 1.0);
    }
    return rows;
  }

  Matrix weights_;
  std::vector<std::vector<std::vector<double>>> demands_;
  Matrix capacities_;
  Mask light_;
  std::map<std::vector<std::size_t>, std::vector<std::vector<double>>> cache_;
};

inline Matrix masked_weights(const GapInstance& inst, const Mask& mask) {
  Matrix w = inst.weight_matrix();
  for (std::size_t u = 0; u < w.size(); ++u)
    for (std::size_t v = 0; v < w[u].size(); ++v)
      if (!mask[u][v]) w[u][v] = 0.0;
  return w;
}

}  // namespace detail

/// Five-phase GAP policy: sample, heavy LP, heavy max, light LP, light max.
/// A drawn bin is used only if the item fits its residual capacity.
inline AllocationLog run_alg2(const GapInstance& inst, const ArrivalTrace& trace, const PolicyParams& params,
                              std::uint64_t seed) {
  params.validate(true);
  if (trace.horizon != params.T) throw std::invalid_argument("trace horizon differs from params.T");
  const std::size_t m = inst.num_bins(), n = inst.num_types();
  const double T = params.T;
  const double t_alpha = params.alpha * T, t_beta = params.beta * T, t_eta = params.eta * T,
               t_theta = params.theta * T;
  const auto classes = classify_edges(inst);
  const Mask heavy = edge_mask(classes, EdgeClass::Heavy);
  const Mask light = edge_mask(classes, EdgeClass::Light);

  Rng rng(seed);
  AllocationLog log;
  BinState bins(inst);
  VPrimeCounter vprime(trace, n);
  detail::LpSampler heavy_sampler, light_sampler;
  detail::MaxPhaseMatcher heavy_matcher(detail::masked_weights(inst, heavy));
  detail::LightMaxSampler light_max(inst, light);
  bool heavy_ready = false, light_ready = false;

  for (std::size_t k = trace.first_online(); k < trace.events.size(); ++k) {
    const Arrival& a = trace.events[k];
    if (a.t < t_alpha) {
      detail::decide(log, bins, inst, a, Phase::Sample, std::nullopt);
    } else if (a.t < t_beta) {
      if (!heavy_ready) {
        const double t_prime = (1.0 - params.alpha) * T;
        const RateEstimate est = estimate_rates(trace, t_alpha, params.delta, n);
        const EdgeLp lp = build_lp_heavy(est.lambda_hat, t_prime, inst.weight_matrix(), heavy, inst.dim());
        heavy_sampler = detail::LpSampler(lp, est, t_prime, params.gamma, m, n);
        heavy_ready = true;
      }
      detail::decide(log, bins, inst, a, Phase::HeavyLp, heavy_sampler.draw(a.type, rng.uniform()));
    } else if (a.t < t_eta) {
      const auto counts = vprime.at(a.t, a.type);
      detail::decide(log, bins, inst, a, Phase::HeavyMax, heavy_matcher.partner(counts, a.type, rng.uniform()));
    } else if (a.t < t_theta) {
      if (!light_ready) {
        const double t_prime = (1.0 - params.eta) * T;
        const RateEstimate est = estimate_rates(trace, t_eta, params.delta, n);
        const EdgeLp lp = build_lp_light0(est.lambda_hat, t_prime, bins.residual(), inst.weight_matrix(),
                                          inst.demand_tensor(), light);
        light_sampler = detail::LpSampler(lp, est, t_prime, params.gamma_prime, m, n);
        light_ready = true;
      }
      detail::decide(log, bins, inst, a, Phase::LightLp, light_sampler.draw(a.type, rng.uniform()));
    } else {
      const auto counts = vprime.at(a.t, a.type);
      detail::decide(log, bins, inst, a, Phase::LightMax, light_max.draw(counts, a.type, rng.uniform()));
    }
  }
  log.residual = bins.residual();
  return log;
}

/// Packs each arrival into the feasible bin of largest positive weight
/// (lowest index on ties); rejects when none exists.
inline AllocationLog run_greedy(const GapInstance& inst, const ArrivalTrace& trace) {
  AllocationLog log;
  BinState bins(inst);
  for (std::size_t k = trace.first_online(); k < trace.events.size(); ++k) {
    const Arrival& a = trace.events[k];
    std::optional<std::size_t> best;
    for (std::size_t u = 0; u < inst.num_bins(); ++u) {
      const double w = inst.weight(u, a.type);
      if (w > 0.0 && bins.fits(u, a.type) && (!best || w > inst.weight(*best, a.type))) best = u;
    }
    detail::decide(log, bins, inst, a, Phase::Greedy, best);
  }
  log.residual = bins.residual();
  return log;
}

enum class GapVariant { SamMax, SamLP, SamMix };

inline PolicyParams preset_gap(double h, std::size_t D, GapVariant variant) {
  if (!(h >= 0.0 && h <= 1.0)) throw std::invalid_argument("h must lie in [0, 1]");
  if (variant == GapVariant::SamMax) {
    PolicyParams p = advise_nolp(h, D).params;
    p.h = h;
    p.alpha = p.beta = std::clamp(p.alpha, 0.0, p.eta);
    return p;
  }
  const double e1 = solve_eta1(D);
  PolicyParams p;
  p.h = h;
  // eta_1 drops below 0.05 once D >= 5; keep the phase order valid there.
  p.alpha = std::min(0.05, e1);
  p.gamma = p.gamma_prime = 1.0;
  if (variant == GapVariant::SamLP) {
    p.beta = p.eta = e1;
    p.theta = 1.0;
  } else {
    p.beta = p.alpha + (e1 - p.alpha) / 2.0;
    p.eta = e1;
    p.theta = e1 + (1.0 - e1) / 2.0;
  }
  return p;
}

}  // namespace pgap
