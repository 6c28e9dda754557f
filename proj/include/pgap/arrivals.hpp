#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgap/common.hpp"

namespace pgap {

struct Arrival {
  double t = 0.0;
  std::size_t type = 0;
};

/// Time-sorted arrivals over [-hT, T). Events with t < 0 are history.
struct ArrivalTrace {
  std::vector<Arrival> events;
  double horizon = 0.0;           // T
  double history_fraction = 0.0;  // h

  double history_span() const { return history_fraction * horizon; }
  double online_span() const { return horizon; }

  /// Index of the first event with t >= 0.
  std::size_t first_online() const {
    return static_cast<std::size_t>(
        std::partition_point(events.begin(), events.end(), [](const Arrival& a) { return a.t < 0.0; }) -
        events.begin());
  }

  /// Number of events with t < x.
  std::size_t count_before(double x) const {
    return static_cast<std::size_t>(
        std::partition_point(events.begin(), events.end(), [x](const Arrival& a) { return a.t < x; }) - events.begin());
  }
};

/// Samples independent homogeneous Poisson streams per type over [-hT, T).
///
/// Each type owns two substreams derived from (seed, type): one walks forward
/// from 0 over the online window, the other walks backward from 0 over the
/// history window. Consequently the online part of a trace does not depend on
/// h, and the history for a smaller h is a suffix of the history for a larger h.
inline ArrivalTrace sample_trace(const std::vector<double>& rates, double horizon, double h, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(h >= 0.0 && h <= 1.0)) throw std::invalid_argument("history fraction must lie in [0, 1]");
  ArrivalTrace trace;
  trace.horizon = horizon;
  trace.history_fraction = h;
  const double history = h * horizon;
  for (std::size_t v = 0; v < rates.size(); ++v) {
    const double rate = rates[v];
    if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("rates must be finite and > 0");
    auto exp_draw = [rate](Rng& rng) { return -std::log1p(-rng.uniform()) / rate; };

    Rng online(mix_seed({seed, v, 1}));
    for (double t = exp_draw(online); t < horizon; t += exp_draw(online)) trace.events.push_back({t, v});

    if (history > 0.0) {
      Rng past(mix_seed({seed, v, 2}));
      for (double s = exp_draw(past); s <= history; s += exp_draw(past)) trace.events.push_back({-s, v});
    }
  }
  std::sort(trace.events.begin(), trace.events.end(),
            [](const Arrival& a, const Arrival& b) { return a.t < b.t || (a.t == b.t && a.type < b.type); });
  return trace;
}

struct RateEstimate {
  std::vector<double> lambda_hat;
  std::vector<std::size_t> n_obs;
  std::vector<double> delta_width;  // sqrt(4 ln(1/delta) / n), +inf when n = 0
  std::vector<bool> degenerate;
  double window = 0.0;  // hT + upto
  std::vector<std::string> warnings;

  bool is_degenerate(std::size_t v) const { return degenerate[v]; }
};

/// Window maximum-likelihood rate estimate n_v / (hT + upto) from all events
/// in [-hT, upto). Types without observations get the floor 1/W and an
/// infinite width (or 0 when the window is empty) and are flagged.
inline RateEstimate estimate_rates(const ArrivalTrace& trace, double upto, double delta, std::size_t num_types) {
  if (!(upto >= 0.0 && upto <= trace.horizon)) throw std::invalid_argument("estimation time must lie in [0, T]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  RateEstimate est;
  est.window = trace.history_span() + upto;
  est.n_obs.assign(num_types, 0);
  const std::size_t end = trace.count_before(upto);
  for (std::size_t i = 0; i < end; ++i) {
    const auto type = trace.events[i].type;
    if (type >= num_types) throw std::invalid_argument("trace type index out of range");
    ++est.n_obs[type];
  }
  est.lambda_hat.resize(num_types);
  est.delta_width.resize(num_types);
  est.degenerate.assign(num_types, false);
  const double log_term = 4.0 * std::log(1.0 / delta);
  for (std::size_t v = 0; v < num_types; ++v) {
    const auto n = est.n_obs[v];
    if (n == 0) {
      est.degenerate[v] = true;
      est.lambda_hat[v] = est.window > 0.0 ? 1.0 / est.window : 0.0;
      est.delta_width[v] = kInf;
      est.warnings.push_back("type " + std::to_string(v) + ": no observations in estimation window");
    } else {
      est.lambda_hat[v] = static_cast<double>(n) / est.window;
      est.delta_width[v] = std::sqrt(log_term / static_cast<double>(n));
    }
  }
  return est;
}

/// Probability that a Poisson count with mean N is at least N/2: 1 - e^{-N/8}.
inline double min_sample_prob(double expected_count) {
  if (expected_count < 0.0) throw std::invalid_argument("expected count must be >= 0");
  return -std::expm1(-expected_count / 8.0);
}

/// Per-type counts of online arrivals (0 <= t < T).
inline std::vector<std::size_t> online_counts(const ArrivalTrace& trace, std::size_t num_types) {
  std::vector<std::size_t> counts(num_types, 0);
  for (std::size_t i = trace.first_online(); i < trace.events.size(); ++i) {
    if (trace.events[i].t >= trace.horizon) break;
    ++counts.at(trace.events[i].type);
  }
  return counts;
}

inline void write_trace_csv(const ArrivalTrace& trace, std::ostream& out) {
  out << "t,type\n";
  for (const auto& e : trace.events) out << format_double(e.t) << ',' << e.type << '\n';
}

/// Reads a `t,type` CSV. T and h are not part of the file format.
inline ArrivalTrace read_trace_csv(std::istream& in, double horizon, double h) {
  ArrivalTrace trace;
  trace.horizon = horizon;
  trace.history_fraction = h;
  std::string line;
  if (!std::getline(in, line) || (line != "t,type" && line != "t,type\r")) throw std::runtime_error("trace csv: missing 't,type' header");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("trace csv: row " + std::to_string(row) + ": malformed");
    try {
      std::size_t pos = 0;
      double t = std::stod(line.substr(0, comma), &pos);
      long long type = std::stoll(line.substr(comma + 1));
      if (type < 0 || !std::isfinite(t)) throw std::invalid_argument("range");
      if (t < -h * horizon || t >= horizon)
        throw std::runtime_error("trace csv: row " + std::to_string(row) + ": time outside [-hT, T)");
      if (!trace.events.empty() && t < trace.events.back().t) throw std::runtime_error("trace csv: rows not sorted at row " + std::to_string(row));
      trace.events.push_back({t, static_cast<std::size_t>(type)});
    } catch (const std::logic_error&) {
      throw std::runtime_error("trace csv: row " + std::to_string(row) + ": malformed");
    }
  }
  return trace;
}

}  // namespace pgap
