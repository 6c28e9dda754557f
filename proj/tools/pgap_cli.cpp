// Command-line front end: instance generation, traces, experiments, bounds.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pgap/pgap.hpp"

namespace {

using nlohmann::json;

// JSON config files: top-level keys are flag names, nested objects are
// subcommands, e.g. {"run": {"seed": 3, "T": [250, 500], "alg": ["Grd"]}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, "", {}, items);
    return items;
  }

 private:
  static json dump(const CLI::App* app, bool default_also) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames()[0];
      if (opt->count() > 0)
        j[name] = opt->get_type_size() == 0 ? json(true) : json(opt->results());
      else if (default_also && !opt->get_default_str().empty())
        j[name] = opt->get_default_str();
    }
    for (const CLI::App* sub : app->get_subcommands({})) j[sub->get_name()] = dump(sub, default_also);
    return j;
  }

  static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  static void collect(const json& j, const std::string& name, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& out) {
    if (j.is_object()) {
      if (!name.empty()) parents.push_back(name);
      for (auto it = j.begin(); it != j.end(); ++it) collect(*it, it.key(), parents, out);
      return;
    }
    if (name.empty()) throw CLI::ConversionError("config must be a JSON object");
    CLI::ConfigItem item;
    item.name = name;
    item.parents = parents;
    if (j.is_array())
      for (const auto& v : j) item.inputs.push_back(scalar(v));
    else
      item.inputs.push_back(scalar(j));
    out.push_back(std::move(item));
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

// "Grd" or "name=mine,kind=alg2,alpha=0.1,beta=0.2,..."
pgap::AlgorithmSpec parse_algorithm(const std::string& text) {
  if (text.find('=') == std::string::npos) return {text, "", {}};
  json j = json::object();
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad algorithm field: " + part);
    const std::string key = part.substr(0, eq), value = part.substr(eq + 1);
    if (key == "name" || key == "kind")
      j[key] = value;
    else
      j[key] = std::stod(value);
  }
  if (!j.contains("name")) j["name"] = j.value("kind", std::string{"custom"});
  return pgap::algorithm_from_json(j);
}

json advice_json(const pgap::Advice& a) {
  const auto& p = a.params;
  json j{{"regime", a.regime},
         {"params",
          {{"alpha", p.alpha}, {"beta", p.beta}, {"eta", p.eta}, {"theta", p.theta}, {"gamma", p.gamma},
           {"gamma_prime", p.gamma_prime}, {"h", p.h}}},
         {"ratio", a.report.ratio},
         {"vacuous", a.report.vacuous},
         {"infeasible", a.infeasible}};
  if (a.report.success_prob != 0.0) j["success_prob"] = a.report.success_prob;
  if (!a.report.intermediate.empty()) j["intermediate"] = a.report.intermediate;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-based online matching and GAP laboratory"};
  // --h is the history fraction, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the command-line flags");
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance as JSON");
  std::size_t gm = 10, gn = 10, gdim = 1;
  double gcap = 1.0;
  std::uint64_t gseed = 1;
  bool gmatching = false;
  std::string gout;
  gen->add_option("--m", gm, "Number of bins")->capture_default_str();
  gen->add_option("--n", gn, "Number of item types")->capture_default_str();
  gen->add_option("--dim", gdim, "Capacity dimension D")->capture_default_str();
  gen->add_option("--capacity", gcap, "Capacity in every dimension")->capture_default_str();
  gen->add_option("--seed", gseed, "Seed")->capture_default_str();
  gen->add_flag("--matching", gmatching, "Unit capacities and demands (D = 1)");
  gen->add_option("--out", gout, "Output path (stdout if omitted)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build a matching instance from worker/task CSVs");
  std::string iworkers, itasks, iout;
  double idx = 1.0, idy = 1.0, ithr = 1.0;
  ingest->add_option("--workers", iworkers, "CSV with header x,y,success_rate")->required();
  ingest->add_option("--tasks", itasks, "CSV with header x,y,payoff")->required();
  ingest->add_option("--dx", idx, "Grid cell width")->capture_default_str();
  ingest->add_option("--dy", idy, "Grid cell height")->capture_default_str();
  ingest->add_option("--threshold", ithr, "Maximum centroid distance")->capture_default_str();
  ingest->add_option("--out", iout, "Output path (stdout if omitted)");

  // trace
  auto* trace = app.add_subcommand("trace", "Sample an arrival trace as CSV");
  std::string tinst, tout;
  double tT = 100.0, th = 0.0;
  std::uint64_t tseed = 1;
  trace->add_option("--instance", tinst, "Instance JSON")->required();
  trace->add_option("--T", tT, "Horizon")->capture_default_str();
  trace->add_option("--h", th, "History fraction")->capture_default_str();
  trace->add_option("--seed", tseed, "Seed")->capture_default_str();
  trace->add_option("--out", tout, "Output path (stdout if omitted)");

  // run
  auto* run = app.add_subcommand("run", "Run an experiment and write results CSV");
  std::string rexperiment, rinstance, rout;
  std::vector<double> rT, rh;
  std::vector<std::string> ralg;
  std::size_t rtrials = 0, rgraphs = 0, rworkers = 0, rm = 0, rn = 0, rdim = 0;
  std::uint64_t rseed = 0;
  bool rmatching = false;
  run->add_option("--experiment", rexperiment, "Experiment JSON (instance, algorithms, oracle limits)");
  run->add_option("--instance", rinstance, "Instance JSON instead of synthetic graphs");
  run->add_option("--m", rm, "Synthetic bins");
  run->add_option("--n", rn, "Synthetic item types");
  run->add_option("--dim", rdim, "Synthetic dimension");
  run->add_flag("--matching", rmatching, "Synthetic matching instances");
  run->add_option("--T", rT, "Horizons");
  run->add_option("--h", rh, "History fractions");
  run->add_option("--alg", ralg, "Algorithms: preset name or name=..,kind=alg1|alg2,alpha=..");
  run->add_option("--trials", rtrials, "Trials per graph");
  run->add_option("--graphs", rgraphs, "Synthetic graphs");
  run->add_option("--seed", rseed, "Master seed");
  run->add_option("--workers", rworkers, "Worker threads");
  run->add_option("--out", rout, "Results CSV (stdout if omitted)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Write a bound surface CSV");
  std::string bkind = "T1", bout;
  double bN = 1e5, bdelta = 0.01;
  std::size_t bD = 1, bm = 1, bres = 11;
  std::vector<double> bh{0.0};
  bounds->add_option("--kind", bkind, "T1 or T2")->check(CLI::IsMember({"T1", "T2"}))->capture_default_str();
  bounds->add_option("--N", bN, "min_v lambda_v T")->capture_default_str();
  bounds->add_option("--delta", bdelta, "Confidence parameter")->capture_default_str();
  bounds->add_option("--D", bD, "Dimension")->capture_default_str();
  bounds->add_option("--bins", bm, "Number of bins m (success probability only)")->capture_default_str();
  bounds->add_option("--h", bh, "History fractions")->capture_default_str();
  bounds->add_option("--resolution", bres, "Grid points per axis (0 = empty grid)")->capture_default_str();
  bounds->add_option("--out", bout, "Output CSV")->required();

  // advise
  auto* advise = app.add_subcommand("advise", "Print advised parameters and bound as JSON");
  std::string akind = "nolp";
  double ah = 0.0, aN = 1e5, adelta = 0.01;
  std::size_t aD = 1, am = 1;
  advise->add_option("--kind", akind, "cor1, nomax, nolp or nosamples")
      ->check(CLI::IsMember({"cor1", "nomax", "nolp", "nosamples"}))
      ->capture_default_str();
  advise->add_option("--h", ah, "History fraction")->capture_default_str();
  advise->add_option("--N", aN, "min_v lambda_v T")->capture_default_str();
  advise->add_option("--delta", adelta, "Confidence parameter")->capture_default_str();
  advise->add_option("--D", aD, "Dimension")->capture_default_str();
  advise->add_option("--bins", am, "Number of bins m")->capture_default_str();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Offline optimum of a trace's online arrivals");
  std::string oinst, otrace;
  double oT = 100.0, oh = 0.0;
  std::size_t omax_items = 25, omax_nodes = 20000;
  oracle->add_option("--instance", oinst, "Instance JSON")->required();
  oracle->add_option("--trace", otrace, "Trace CSV (t,type)")->required();
  oracle->add_option("--T", oT, "Horizon")->capture_default_str();
  oracle->add_option("--h", oh, "History fraction")->capture_default_str();
  oracle->add_option("--max-items", omax_items, "Exact search item budget")->capture_default_str();
  oracle->add_option("--max-nodes", omax_nodes, "Exact search node budget")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      pgap::GapInstance inst = pgap::generate_synthetic_gap(gm, gn, gdim, gcap, gseed);
      if (gmatching) inst = pgap::to_matching(inst);
      write_text(gout, pgap::to_json(inst).dump(2) + "\n");
    } else if (*ingest) {
      write_text(iout, pgap::to_json(pgap::ingest_worker_task_csv(iworkers, itasks, idx, idy, ithr)).dump(2) + "\n");
    } else if (*trace) {
      const auto inst = pgap::load_instance(tinst);
      std::ostringstream ss;
      pgap::write_trace_csv(pgap::sample_trace(inst.rates(), tT, th, tseed), ss);
      write_text(tout, ss.str());
    } else if (*run) {
      pgap::ExperimentConfig cfg;
      if (!rexperiment.empty()) {
        std::ifstream in(rexperiment);
        if (!in) throw std::runtime_error("cannot open " + rexperiment);
        cfg = pgap::config_from_json(json::parse(in));
      }
      if (!rinstance.empty()) cfg.source = pgap::FileSource{rinstance};
      if (auto* s = std::get_if<pgap::SyntheticSource>(&cfg.source)) {
        if (rm) s->m = rm;
        if (rn) s->n = rn;
        if (rdim) s->dim = rdim;
        if (rmatching) s->matching = true;
      }
      if (!rT.empty()) cfg.T = rT;
      if (!rh.empty()) cfg.h = rh;
      if (!ralg.empty()) {
        cfg.algorithms.clear();
        for (const auto& a : ralg) cfg.algorithms.push_back(parse_algorithm(a));
      }
      if (rtrials) cfg.trials = rtrials;
      if (rgraphs) cfg.graphs = rgraphs;
      if (run->count("--seed")) cfg.master_seed = rseed;
      if (rworkers) cfg.workers = rworkers;
      if (!rout.empty()) cfg.out = rout;
      std::ostringstream ss;
      pgap::write_results_csv(pgap::run_experiment(cfg), ss);
      write_text(cfg.out, ss.str());
    } else if (*bounds) {
      pgap::BoundInputs in;
      in.N = bN;
      in.delta = bdelta;
      in.D = bD;
      in.m = bm;
      pgap::export_bound_surface(bkind == "T1" ? pgap::BoundKind::T1 : pgap::BoundKind::T2, in, bh, bres, bout);
    } else if (*advise) {
      pgap::Advice a;
      if (akind == "cor1")
        a = pgap::cor1_params(aN, adelta, am);
      else if (akind == "nomax")
        a = pgap::advise_nomax(ah, aN, aD, adelta, am);
      else if (akind == "nosamples")
        a = pgap::cor_nosamples_gap(aD, aN, adelta);
      else
        a = pgap::advise_nolp(ah, aD);
      std::cout << advice_json(a).dump(2) << '\n';
    } else if (*oracle) {
      const auto inst = pgap::load_instance(oinst);
      std::ifstream in(otrace);
      if (!in) throw std::runtime_error("cannot open " + otrace);
      const auto tr = pgap::read_trace_csv(in, oT, oh);
      const auto realized = pgap::RealizedDemandSet::from_trace(tr, inst.num_types());
      const auto r = pgap::offline_opt(inst, realized, {omax_items, omax_nodes});
      json j{{"value", r.value},
             {"upper_bound_only", r.upper_bound_only},
             {"lp_bound", pgap::lp_upper_bound_gap(inst, realized)},
             {"items", realized.total()}};
      std::cout << j.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
