#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgap/arrivals.hpp"
#include "pgap/common.hpp"
#include "pgap/instance.hpp"

namespace pgap {

/// Phase boundaries are fractions of the horizon: [0, aT) sampling,
/// [aT, bT) LP, ... run_alg1 ignores eta, theta and gamma_prime.
struct PolicyParams {
  double alpha = 0.0;
  double beta = 1.0;
  double eta = 1.0;
  double theta = 1.0;
  double gamma = 1.0;
  double gamma_prime = 1.0;
  double h = 0.0;
  double T = 1.0;
  double delta = 0.05;

  void validate(bool uses_light_phases) const {
    auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in01(alpha) || !in01(beta) || !in01(gamma) || !in01(h))
      throw std::invalid_argument("alpha, beta, gamma and h must lie in [0, 1]");
    if (alpha > beta) throw std::invalid_argument("need alpha <= beta");
    if (uses_light_phases) {
      if (!in01(eta) || !in01(theta) || !in01(gamma_prime))
        throw std::invalid_argument("eta, theta and gamma' must lie in [0, 1]");
      if (beta > eta || eta > theta) throw std::invalid_argument("need alpha <= beta <= eta <= theta <= 1");
    }
    if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  }
};

enum class Phase : std::uint8_t { Sample, Lp, Max, HeavyLp, HeavyMax, LightLp, LightMax, Greedy };

inline constexpr std::size_t kPhaseCount = 8;

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Sample: return "sample";
    case Phase::Lp: return "lp";
    case Phase::Max: return "max";
    case Phase::HeavyLp: return "hlp";
    case Phase::HeavyMax: return "hmax";
    case Phase::LightLp: return "llp";
    case Phase::LightMax: return "lmax";
    case Phase::Greedy: return "greedy";
  }
  return "?";
}

/// One irrevocable decision. bin < 0 means reject.
struct Decision {
  double t = 0.0;
  std::size_t type = 0;
  long bin = -1;
  double reward = 0.0;
  Phase phase = Phase::Sample;
};

struct AllocationLog {
  std::vector<Decision> decisions;
  std::array<double, kPhaseCount> phase_reward{};
  double total_reward = 0.0;
  std::vector<std::vector<double>> residual;  // final per-bin residual capacity

  double reward_in(Phase p) const { return phase_reward[static_cast<std::size_t>(p)]; }
};

/// Per-bin bookkeeping shared by all policies.
class BinState {
 public:
  explicit BinState(const GapInstance& inst) : inst_(&inst), residual_(inst.capacity_matrix()), packed_(inst.num_bins(), 0) {}

  bool fits(std::size_t u, std::size_t v) const { return inst_->fits(residual_[u], u, v); }

  void pack(std::size_t u, std::size_t v) {
    auto r = inst_->demand(u, v);
    for (std::size_t d = 0; d < r.size(); ++d) residual_[u][d] = std::max(0.0, residual_[u][d] - r[d]);
    ++packed_[u];
  }

  std::size_t items_packed(std::size_t u) const { return packed_[u]; }
  const std::vector<std::vector<double>>& residual() const { return residual_; }

 private:
  const GapInstance* inst_;
  std::vector<std::vector<double>> residual_;
  std::vector<std::size_t> packed_;
};

namespace detail {

// Records a decision for arrival a; packs `bin` when it is given and fits.
inline void decide(AllocationLog& log, BinState& bins, const GapInstance& inst, const Arrival& a, Phase phase,
                   std::optional<std::size_t> bin) {
  Decision d{a.t, a.type, -1, 0.0, phase};
  if (bin && bins.fits(*bin, a.type)) {
    bins.pack(*bin, a.type);
    d.bin = static_cast<long>(*bin);
    d.reward = inst.weight(*bin, a.type);
  }
  log.phase_reward[static_cast<std::size_t>(phase)] += d.reward;
  log.total_reward += d.reward;
  log.decisions.push_back(d);
}

// Draws a bin from a sub-stochastic distribution using one uniform draw.
// Returns none for the leftover (reject) mass.
inline std::optional<std::size_t> draw_bin(const std::vector<double>& probs, double uniform) {
  double mass = 0.0;
  for (double p : probs) mass += p;
  if (mass > 1.0 + kTol) throw InvariantViolation("sampling distribution has mass " + format_double(mass) + " > 1");
  double acc = 0.0;
  for (std::size_t u = 0; u < probs.size(); ++u) {
    acc += probs[u];
    if (probs[u] > 0.0 && uniform < acc) return u;
  }
  return std::nullopt;
}

// Partner of the current arrival among k exchangeable copies of its type,
// given the bins matched to that type in an optimal matching.
inline std::optional<std::size_t> exchangeable_partner(const std::vector<std::size_t>& matched_bins, std::size_t k,
                                                       double uniform) {
  if (k == 0) return std::nullopt;
  const auto idx = static_cast<std::size_t>(uniform * static_cast<double>(k));
  if (idx < matched_bins.size()) return matched_bins[idx];
  return std::nullopt;
}

// Type counts of V' = arrivals in [-hT, min(t, (1-h)T)) plus the current one.
inline std::vector<std::size_t> vprime_counts(const ArrivalTrace& trace, std::size_t num_types, double t,
                                              std::size_t current_type) {
  const double cut = std::min(t, (1.0 - trace.history_fraction) * trace.horizon);
  std::vector<std::size_t> counts(num_types, 0);
  for (const Arrival& a : trace.events) {
    if (!(a.t < cut)) break;
    ++counts[a.type];
  }
  ++counts[current_type];
  return counts;
}

}  // namespace detail

/// Incremental V' counter for a scan over online arrivals in time order.
class VPrimeCounter {
 public:
  VPrimeCounter(const ArrivalTrace& trace, std::size_t num_types)
      : trace_(&trace), cut_((1.0 - trace.history_fraction) * trace.horizon), counts_(num_types, 0) {}

  /// Counts for V' at time t (non-decreasing across calls) with `type` appended.
  std::vector<std::size_t> at(double t, std::size_t type) {
    const double limit = std::min(t, cut_);
    while (next_ < trace_->events.size() && trace_->events[next_].t < limit) ++counts_[trace_->events[next_++].type];
    auto out = counts_;
    ++out[type];
    return out;
  }

 private:
  const ArrivalTrace* trace_;
  double cut_;
  std::vector<std::size_t> counts_;
  std::size_t next_ = 0;
};

inline void write_log_csv(const AllocationLog& log, std::ostream& out) {
  out << "t,type,bin,reward,phase\n";
  for (const Decision& d : log.decisions)
    out << format_double(d.t) << ',' << d.type << ',' << d.bin << ',' << format_double(d.reward) << ','
        << to_string(d.phase) << '\n';
}

/// Replays a log against the instance and trace. Returns a description of the
/// first problem found, or none if the log is consistent: one decision per
/// online arrival in order, rewards equal to weights, capacities respected,
/// and nothing accepted before `first_accept_time`.
inline std::optional<std::string> verify_log(const GapInstance& inst, const ArrivalTrace& trace,
                                             const AllocationLog& log, double first_accept_time = 0.0) {
  const std::size_t start = trace.first_online();
  if (log.decisions.size() != trace.events.size() - start) return "decision count differs from online arrivals";
  auto residual = inst.capacity_matrix();
  double total = 0.0;
  for (std::size_t k = 0; k < log.decisions.size(); ++k) {
    const Decision& d = log.decisions[k];
    const Arrival& a = trace.events[start + k];
    if (d.t != a.t || d.type != a.type) return "decision " + std::to_string(k) + " does not match its arrival";
    if (d.bin < 0) {
      if (d.reward != 0.0) return "reject with nonzero reward";
      continue;
    }
    const auto u = static_cast<std::size_t>(d.bin);
    if (u >= inst.num_bins()) return "bin index out of range";
    if (d.t < first_accept_time) return "accept before the first decision time";
    if (d.reward != inst.weight(u, d.type)) return "reward differs from weight";
    auto r = inst.demand(u, d.type);
    for (std::size_t dd = 0; dd < r.size(); ++dd) {
      residual[u][dd] -= r[dd];
      if (residual[u][dd] < -kTol * (1.0 + inst.capacity(u, dd))) return "capacity violated at bin " + std::to_string(u);
    }
    total += d.reward;
  }
  if (std::abs(total - log.total_reward) > 1e-9 * (1.0 + std::abs(total))) return "total reward mismatch";
  return std::nullopt;
}

}  // namespace pgap
