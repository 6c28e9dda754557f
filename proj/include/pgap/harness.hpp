#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pgap/bounds.hpp"
#include "pgap/instance_io.hpp"
#include "pgap/oracle.hpp"
#include "pgap/policy_gap.hpp"
#include "pgap/policy_matching.hpp"

namespace pgap {

struct SyntheticSource {
  std::size_t m = 10;
  std::size_t n = 10;
  std::size_t dim = 1;
  double capacity = 1.0;
  bool matching = false;  // unit capacities/demands with the drawn rewards and rates
};

struct FileSource {
  std::string path;
};

struct IngestSource {
  std::string workers;
  std::string tasks;
  double dx = 1.0;
  double dy = 1.0;
  double threshold = 1.0;
};

using InstanceSource = std::variant<SyntheticSource, FileSource, IngestSource>;

/// Named preset (Grd, Sam1, Sam2, SamMax, SamLP, SamMix, Cor1, NoMax) or an
/// explicit parameter set run through run_alg1 ("alg1") or run_alg2 ("alg2").
struct AlgorithmSpec {
  std::string name;
  std::string kind;  // empty for presets
  PolicyParams params;
};

struct ExperimentConfig {
  InstanceSource source = SyntheticSource{};
  std::vector<double> T{250.0};
  std::vector<double> h{0.0};
  std::vector<AlgorithmSpec> algorithms{{"Grd", "", {}}};
  std::size_t trials = 50;
  std::size_t graphs = 1;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
  double delta = 0.05;
  GapOptLimits oracle;
  std::string out;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (graphs < 1) throw std::invalid_argument("graphs must be >= 1");
    if (T.empty() || h.empty() || algorithms.empty()) throw std::invalid_argument("T, h and algorithms must be non-empty");
    for (double t : T)
      if (!(t > 0.0)) throw std::invalid_argument("T values must be > 0");
    for (double x : h)
      if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("h values must lie in [0, 1]");
    for (const auto& a : algorithms) {
      static const std::vector<std::string> known{"Grd", "Sam1", "Sam2", "SamMax", "SamLP", "SamMix", "Cor1", "NoMax"};
      if (a.kind.empty() && std::find(known.begin(), known.end(), a.name) == known.end())
        throw std::invalid_argument("unknown algorithm: " + a.name);
      if (!a.kind.empty() && a.kind != "alg1" && a.kind != "alg2")
        throw std::invalid_argument("algorithm kind must be alg1 or alg2: " + a.kind);
    }
  }
};

inline AlgorithmSpec algorithm_from_json(const nlohmann::json& j) {
  if (j.is_string()) return {j.get<std::string>(), "", {}};
  AlgorithmSpec a;
  a.name = j.at("name").get<std::string>();
  a.kind = j.value("kind", std::string{});
  auto& p = a.params;
  p.alpha = j.value("alpha", p.alpha);
  p.beta = j.value("beta", p.beta);
  p.eta = j.value("eta", p.eta);
  p.theta = j.value("theta", p.theta);
  p.gamma = j.value("gamma", p.gamma);
  p.gamma_prime = j.value("gamma_prime", p.gamma_prime);
  return a;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("instance")) {
    const auto& s = j.at("instance");
    const std::string kind = s.value("source", std::string{"synthetic"});
    if (kind == "synthetic") {
      SyntheticSource src;
      src.m = s.value("m", src.m);
      src.n = s.value("n", src.n);
      src.dim = s.value("dim", src.dim);
      src.capacity = s.value("capacity", src.capacity);
      src.matching = s.value("matching", src.matching);
      c.source = src;
    } else if (kind == "file") {
      c.source = FileSource{s.at("path").get<std::string>()};
    } else if (kind == "ingest") {
      c.source = IngestSource{s.at("workers").get<std::string>(), s.at("tasks").get<std::string>(),
                              s.at("dx").get<double>(), s.at("dy").get<double>(), s.at("threshold").get<double>()};
    } else {
      throw std::invalid_argument("unknown instance source: " + kind);
    }
  }
  auto number_list = [&](const char* key, std::vector<double>& dst) {
    if (!j.contains(key)) return;
    dst = j.at(key).is_array() ? j.at(key).get<std::vector<double>>() : std::vector<double>{j.at(key).get<double>()};
  };
  number_list("T", c.T);
  number_list("h", c.h);
  if (j.contains("alg")) {
    c.algorithms.clear();
    const auto& a = j.at("alg");
    if (a.is_array())
      for (const auto& x : a) c.algorithms.push_back(algorithm_from_json(x));
    else
      c.algorithms.push_back(algorithm_from_json(a));
  }
  c.trials = j.value("trials", c.trials);
  c.graphs = j.value("graphs", c.graphs);
  c.master_seed = j.value("seed", c.master_seed);
  c.workers = j.value("workers", c.workers);
  c.delta = j.value("delta", c.delta);
  c.out = j.value("out", c.out);
  if (j.contains("oracle")) {
    c.oracle.max_items = j.at("oracle").value("max_items", c.oracle.max_items);
    c.oracle.max_nodes = j.at("oracle").value("max_nodes", c.oracle.max_nodes);
  }
  return c;
}

/// One aggregated row. graph = -1 marks the across-graph summary, whose
/// std_error is the standard error of per-graph ratios.
struct ResultRow {
  long graph = 0;
  std::string algorithm;
  double T = 0.0;
  double h = 0.0;
  double mean_alg_reward = 0.0;
  double mean_offline_opt = 0.0;
  double empirical_ratio = 0.0;   // mean_alg_reward / mean_offline_opt
  double mean_graph_ratio = 0.0;  // mean of per-graph ratios (summary rows)
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t opt_bound_trials = 0;  // trials whose OPT is the LP relaxation
  std::size_t violations = 0;        // dominance or feasibility failures
};

/// Raw outcome of one (graph, algorithm, T, h, trial) run.
struct TrialRecord {
  double reward = 0.0;
  double opt = 0.0;
  bool opt_bound = false;
  bool violation = false;
  double first_accept = 0.0;
};

inline std::uint64_t seed_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

inline std::uint64_t hash_name(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

/// Seed of graph g's synthetic instance.
inline std::uint64_t graph_seed(std::uint64_t master, std::size_t g) { return mix_seed({master, g, 0x6A1ULL}); }

/// Trace seed. It leaves out h and the algorithm, so every algorithm and every
/// history length sees the same online arrivals in a given trial.
inline std::uint64_t trace_seed(std::uint64_t master, std::size_t g, double T, std::size_t trial) {
  return mix_seed({master, g, seed_bits(T), trial, 0x7ACEULL});
}

inline std::uint64_t policy_seed(std::uint64_t master, std::size_t g, const std::string& alg, double T, double h,
                                 std::size_t trial) {
  return mix_seed({master, g, hash_name(alg), seed_bits(T), seed_bits(h), trial});
}

inline GapInstance build_instance(const InstanceSource& src, std::uint64_t seed) {
  if (auto s = std::get_if<SyntheticSource>(&src)) {
    GapInstance inst = generate_synthetic_gap(s->m, s->n, s->dim, s->capacity, seed);
    return s->matching ? to_matching(inst) : inst;
  }
  if (auto f = std::get_if<FileSource>(&src)) return load_instance(f->path);
  const auto& i = std::get<IngestSource>(src);
  return ingest_worker_task_csv(i.workers, i.tasks, i.dx, i.dy, i.threshold);
}

inline double min_expected_arrivals(const GapInstance& inst, double T) {
  double lo = kInf;
  for (std::size_t v = 0; v < inst.num_types(); ++v) lo = std::min(lo, inst.rate(v) * T);
  return lo;
}

/// Resolves an algorithm entry to (runs alg2?, params) for one (instance, T, h).
/// Greedy is signalled by nullopt.
inline std::optional<std::pair<bool, PolicyParams>> resolve_algorithm(const AlgorithmSpec& a, const GapInstance& inst,
                                                                      double T, double h, double delta) {
  PolicyParams p;
  bool gap = true;
  if (a.kind == "alg1" || a.kind == "alg2") {
    p = a.params;
    gap = a.kind == "alg2";
  } else if (a.name == "Grd") {
    return std::nullopt;
  } else if (a.name == "Sam1" || a.name == "Sam2") {
    p = preset_sam(h, a.name == "Sam1" ? SamVariant::Sam1 : SamVariant::Sam2);
    gap = false;
  } else if (a.name == "Cor1") {
    p = cor1_params(min_expected_arrivals(inst, T), delta, inst.num_bins()).params;
    gap = false;
  } else if (a.name == "NoMax") {
    p = advise_nomax(h, min_expected_arrivals(inst, T), inst.dim(), delta, inst.num_bins()).params;
  } else {
    const GapVariant v = a.name == "SamMax" ? GapVariant::SamMax : a.name == "SamLP" ? GapVariant::SamLP : GapVariant::SamMix;
    p = preset_gap(h, inst.dim(), v);
  }
  p.T = T;
  p.h = h;
  p.delta = delta;
  return std::make_pair(gap, p);
}

namespace detail {

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

// Standard error of a ratio of means a/o by the delta method.
inline double ratio_std_error(const std::vector<double>& a, const std::vector<double>& o) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  const double ma = mean(a), mo = mean(o);
  if (!(mo > 0.0)) return 0.0;
  const double r = ma / mo;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (a[i] - r * o[i]) * (a[i] - r * o[i]);
  return std::sqrt(ss / static_cast<double>(n * (n - 1))) / mo;
}

}  // namespace detail

/// Runs every (graph, algorithm, T, h, trial) combination. Work is split by
/// (graph, T, trial) across `workers` threads; results land in fixed slots and
/// are aggregated in a fixed order, so the output does not depend on the
/// number of workers.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool fixed_source = !std::holds_alternative<SyntheticSource>(cfg.source);
  const std::size_t G = fixed_source ? 1 : cfg.graphs;
  const std::size_t A = cfg.algorithms.size(), NT = cfg.T.size(), NH = cfg.h.size(), M = cfg.trials;

  std::vector<GapInstance> instances;
  for (std::size_t g = 0; g < G; ++g) instances.push_back(build_instance(cfg.source, graph_seed(cfg.master_seed, g)));
  for (const auto& a : cfg.algorithms) {
    const bool needs_matching = a.kind == "alg1" || a.name == "Sam1" || a.name == "Sam2" || a.name == "Cor1";
    if (needs_matching)
      for (const auto& inst : instances)
        if (!inst.is_matching()) throw std::invalid_argument(a.name + " needs a matching instance");
  }

  // records[((((g * NT + ti) * M + trial) * NH + hi) * A + ai)]
  std::vector<TrialRecord> records(G * NT * M * NH * A);
  const std::size_t units = G * NT * M;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;

  auto work = [&] {
    for (std::size_t unit = next++; unit < units; unit = next++) {
      const std::size_t g = unit / (NT * M), ti = (unit / M) % NT, trial = unit % M;
      const GapInstance& inst = instances[g];
      const double T = cfg.T[ti];
      try {
        std::optional<GapOptResult> opt;
        for (std::size_t hi = 0; hi < NH; ++hi) {
          const double h = cfg.h[hi];
          const ArrivalTrace trace = sample_trace(inst.rates(), T, h, trace_seed(cfg.master_seed, g, T, trial));
          if (!opt) opt = offline_opt(inst, RealizedDemandSet::from_trace(trace, inst.num_types()), cfg.oracle);
          for (std::size_t ai = 0; ai < A; ++ai) {
            const auto& alg = cfg.algorithms[ai];
            const auto resolved = resolve_algorithm(alg, inst, T, h, cfg.delta);
            const std::uint64_t seed = policy_seed(cfg.master_seed, g, alg.name, T, h, trial);
            AllocationLog log;
            double first_accept = 0.0;
            if (!resolved) {
              log = run_greedy(inst, trace);
            } else {
              const auto& [gap, p] = *resolved;
              log = gap ? run_alg2(inst, trace, p, seed) : run_alg1(inst, trace, p, seed);
              first_accept = p.alpha * T;
            }
            TrialRecord rec;
            rec.reward = log.total_reward;
            rec.opt = opt->value;
            rec.opt_bound = opt->upper_bound_only;
            rec.first_accept = first_accept;
            rec.violation = log.total_reward > opt->value + 1e-9 * (1.0 + opt->value) ||
                            verify_log(inst, trace, log, first_accept).has_value();
            records[(((g * NT + ti) * M + trial) * NH + hi) * A + ai] = rec;
          }
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(cfg.workers, units));
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (!first_error.empty()) throw std::runtime_error("experiment failed: " + first_error);

  std::vector<ResultRow> rows;
  for (std::size_t ai = 0; ai < A; ++ai)
    for (std::size_t ti = 0; ti < NT; ++ti)
      for (std::size_t hi = 0; hi < NH; ++hi) {
        std::vector<double> graph_ratio, graph_alg, graph_opt;
        ResultRow summary{-1, cfg.algorithms[ai].name, cfg.T[ti], cfg.h[hi]};
        for (std::size_t g = 0; g < G; ++g) {
          std::vector<double> a, o;
          ResultRow row{static_cast<long>(g), cfg.algorithms[ai].name, cfg.T[ti], cfg.h[hi]};
          for (std::size_t trial = 0; trial < M; ++trial) {
            const TrialRecord& r = records[(((g * NT + ti) * M + trial) * NH + hi) * A + ai];
            a.push_back(r.reward);
            o.push_back(r.opt);
            row.opt_bound_trials += r.opt_bound;
            row.violations += r.violation;
          }
          row.trials = M;
          row.mean_alg_reward = detail::mean(a);
          row.mean_offline_opt = detail::mean(o);
          row.empirical_ratio = row.mean_alg_reward / row.mean_offline_opt;
          row.mean_graph_ratio = row.empirical_ratio;
          row.std_error = detail::ratio_std_error(a, o);
          graph_ratio.push_back(row.empirical_ratio);
          graph_alg.push_back(row.mean_alg_reward);
          graph_opt.push_back(row.mean_offline_opt);
          summary.trials += M;
          summary.opt_bound_trials += row.opt_bound_trials;
          summary.violations += row.violations;
          rows.push_back(row);
        }
        summary.mean_alg_reward = detail::mean(graph_alg);
        summary.mean_offline_opt = detail::mean(graph_opt);
        summary.empirical_ratio = summary.mean_alg_reward / summary.mean_offline_opt;
        summary.mean_graph_ratio = detail::mean(graph_ratio);
        if (G > 1) {
          double ss = 0.0;
          for (double r : graph_ratio) ss += (r - summary.mean_graph_ratio) * (r - summary.mean_graph_ratio);
          summary.std_error = std::sqrt(ss / static_cast<double>(G - 1)) / std::sqrt(static_cast<double>(G));
        } else {
          summary.std_error = rows.back().std_error;
        }
        rows.push_back(summary);
      }
  return rows;
}

inline void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "graph,algorithm,T,h,mean_alg_reward,mean_offline_opt,empirical_ratio,mean_graph_ratio,std_error,trials,"
         "opt_bound_trials,violations\n";
  for (const auto& r : rows)
    out << r.graph << ',' << r.algorithm << ',' << format_double(r.T) << ',' << format_double(r.h) << ','
        << format_double(r.mean_alg_reward) << ',' << format_double(r.mean_offline_opt) << ','
        << format_double(r.empirical_ratio) << ',' << format_double(r.mean_graph_ratio) << ','
        << format_double(r.std_error) << ',' << r.trials << ',' << r.opt_bound_trials << ',' << r.violations << '\n';
}

/// Writes the grid_optimize table for each h in `hs` (header once). A
/// resolution of 0 gives an empty grid, i.e. a header-only file.
inline void export_bound_surface(BoundKind kind, BoundInputs inputs, const std::vector<double>& hs,
                                 std::size_t resolution, const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  write_surface_header(out);
  if (resolution == 0) return;
  for (double h : hs) {
    inputs.h = h;
    write_surface_rows(grid_optimize(kind, inputs, resolution), out);
  }
  if (!out) throw std::runtime_error("write to " + out_path + " failed");
}

}  // namespace pgap
