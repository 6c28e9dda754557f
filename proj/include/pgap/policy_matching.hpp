#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pgap/arrivals.hpp"
#include "pgap/instance.hpp"
#include "pgap/lp.hpp"
#include "pgap/lp_builders.hpp"
#include "pgap/matching.hpp"
#include "pgap/policy.hpp"

namespace pgap {

namespace detail {

// LP-phase sampler: p_uv = scale * x_uv / (lambda_v T') built from a solved
// rate LP. Degenerate types get an empty row and are rejected.
class LpSampler {
 public:
  LpSampler() = default;
  LpSampler(const EdgeLp& lp, const RateEstimate& est, double t_prime, double scale, std::size_t bins,
            std::size_t types)
      : probs_(types, std::vector<double>(bins, 0.0)) {
    if (!(t_prime > 0.0)) return;
    const LpSolution sol = solve(lp.program);
    if (!sol.optimal()) throw InvariantViolation(std::string("rate LP not optimal: ") + to_string(sol.status));
    for (std::size_t k = 0; k < lp.edges.size(); ++k) {
      const auto [u, v] = lp.edges[k];
      const double denom = est.lambda_hat[v] * t_prime;
      if (est.is_degenerate(v) || !(denom > 0.0)) continue;
      probs_[v][u] = std::clamp(scale * sol.values[k] / denom, 0.0, 1.0);
    }
  }

  std::optional<std::size_t> draw(std::size_t v, double uniform) const {
    if (probs_.empty()) return std::nullopt;
    return draw_bin(probs_[v], uniform);
  }

  const std::vector<std::vector<double>>& probabilities() const { return probs_; }

 private:
  std::vector<std::vector<double>> probs_;  // types x bins
};

// Max-phase partner via an optimal matching over V'. Results are memoised by
// the V' count vector, which repeats once t >= (1 - h)T.
class MaxPhaseMatcher {
 public:
  explicit MaxPhaseMatcher(std::vector<std::vector<double>> weights) : weights_(std::move(weights)) {}

  std::optional<std::size_t> partner(const std::vector<std::size_t>& counts, std::size_t v, double uniform) {
    auto it = cache_.find(counts);
    if (it == cache_.end()) {
      if (cache_.size() > 4096) cache_.clear();
      it = cache_.emplace(counts, match_type_counts(weights_, counts)).first;
    }
    return exchangeable_partner(it->second.bins_of_type[v], counts[v], uniform);
  }

 private:
  std::vector<std::vector<double>> weights_;
  std::map<std::vector<std::size_t>, TypeMatching> cache_;
};

}  // namespace detail

/// Three-phase matching policy: sample, LP, max-matching.
///
/// One uniform draw is consumed per arrival in the LP and max phases, so that
/// runs with equal seeds stay aligned across phase layouts.
inline AllocationLog run_alg1(const GapInstance& inst, const ArrivalTrace& trace, const PolicyParams& params,
                              std::uint64_t seed) {
  if (!inst.is_matching()) throw std::invalid_argument("run_alg1 needs a unit-capacity matching instance");
  params.validate(false);
  if (trace.horizon != params.T) throw std::invalid_argument("trace horizon differs from params.T");
  const std::size_t m = inst.num_bins(), n = inst.num_types();
  const double T = params.T;
  const double t_alpha = params.alpha * T, t_beta = params.beta * T;

  Rng rng(seed);
  AllocationLog log;
  BinState bins(inst);
  VPrimeCounter vprime(trace, n);
  detail::LpSampler sampler;
  detail::MaxPhaseMatcher matcher(inst.weight_matrix());
  bool estimated = false;

  for (std::size_t k = trace.first_online(); k < trace.events.size(); ++k) {
    const Arrival& a = trace.events[k];
    if (a.t < t_alpha) {
      detail::decide(log, bins, inst, a, Phase::Sample, std::nullopt);
      continue;
    }
    if (a.t < t_beta) {
      if (!estimated) {
        const double t_prime = (1.0 - params.alpha) * T;
        const RateEstimate est = estimate_rates(trace, t_alpha, params.delta, n);
        const EdgeLp lp = build_lp_matching(est.lambda_hat, t_prime, inst.weight_matrix());
        sampler = detail::LpSampler(lp, est, t_prime, params.gamma, m, n);
        estimated = true;
      }
      detail::decide(log, bins, inst, a, Phase::Lp, sampler.draw(a.type, rng.uniform()));
      continue;
    }
    const auto counts = vprime.at(a.t, a.type);
    detail::decide(log, bins, inst, a, Phase::Max, matcher.partner(counts, a.type, rng.uniform()));
  }
  log.residual = bins.residual();
  return log;
}

enum class SamVariant { Sam1, Sam2 };

/// Stationary point of (h + a)(ln(1/(h + a)) + 1 - e^{-h}) in a, floored at 0.
inline double sam_alpha(double h) { return std::max(std::exp(-std::exp(-h)) - h, 0.0); }

inline PolicyParams preset_sam(double h, SamVariant variant) {
  if (!(h >= 0.0 && h <= 1.0)) throw std::invalid_argument("h must lie in [0, 1]");
  PolicyParams p;
  p.h = h;
  p.beta = variant == SamVariant::Sam1 ? 1.0 - h : 1.0;
  p.alpha = std::clamp(sam_alpha(h), 0.0, p.beta);
  p.gamma = 1.0;
  p.eta = p.theta = 1.0;
  return p;
}

}  // namespace pgap
