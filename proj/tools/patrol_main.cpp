// Command-line front end: instance generation, strategy synthesis with
// trace/summary/manifest output, exact evaluation, and oracle cross-checks.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "patrol/evaluator.hpp"
#include "patrol/gradient.hpp"
#include "patrol/graph.hpp"
#include "patrol/optimizer.hpp"
#include "patrol/oracle.hpp"
#include "patrol/strategy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace patrol;

namespace {

std::vector<int> parse_gates(const std::string& spec) {
  std::vector<int> gates;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    gates.push_back(std::stoi(item));
  }
  if (gates.empty()) throw std::runtime_error("--gates needs at least one terminal, e.g. 4,2,6");
  return gates;
}

// Memory spec: comma-separated k=v with keys `default`, `targets`,
// `nontargets` (alias `halls`) or an exact vertex name. Precedence:
// default < role < named vertex. Example: "targets=1,halls=4".
std::vector<int> parse_mem_spec(const std::string& spec, const PatrollingGraph& g) {
  int def = 1, mem_targets = -1, mem_nontargets = -1;
  std::vector<std::pair<int, int>> named;  // (vertex, mem)
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--mem entry '" + item + "' is not key=value");
    std::string key = item.substr(0, eq);
    int val = std::stoi(item.substr(eq + 1));
    if (val < 1) throw std::runtime_error("--mem value for '" + key + "' must be >= 1");
    if (key == "default") def = val;
    else if (key == "targets") mem_targets = val;
    else if (key == "nontargets" || key == "halls") mem_nontargets = val;
    else {
      int v = g.vertex_id(key);
      if (v < 0)
        throw std::runtime_error("--mem key '" + key +
                                 "' is neither a role (default/targets/nontargets/halls) nor a vertex");
      named.push_back({v, val});
    }
  }
  std::vector<int> mem(g.vertex_count(), def);
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.is_target(v) && mem_targets > 0) mem[v] = mem_targets;
    if (!g.is_target(v) && mem_nontargets > 0) mem[v] = mem_nontargets;
  }
  for (auto [v, m] : named) mem[v] = m;
  return mem;
}

std::string trial_name(const char* stem, int trial, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.%s", stem, trial, ext);
  return buf;
}

struct SynthOptions {
  std::string graph_path;
  std::string mem_spec = "default=1";
  std::string out_dir = "synth_out";
  std::string baseline;  // empty, "airport", or a number
  std::string replay;    // manifest path
  OptimizerConfig cfg;
  int trials = 1;
  int jobs = 1;
  bool serial = false;
  bool out_dir_given = false;
};

json config_json(const OptimizerConfig& c) {
  return json{{"steps", c.steps},
              {"eps", c.eps},
              {"beta", c.beta},
              {"lr", c.learning_rate},
              {"cutoff", c.cutoff_threshold},
              {"rounding", c.rounding_threshold},
              {"noise_std0", c.noise_std0},
              {"noise_decay", c.noise_decay},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"adam_eps", c.adam_eps}};
}

void config_from_json(const json& j, OptimizerConfig& c) {
  c.steps = j.at("steps").get<int>();
  c.eps = j.at("eps").get<double>();
  c.beta = j.at("beta").get<double>();
  c.learning_rate = j.at("lr").get<double>();
  c.cutoff_threshold = j.at("cutoff").get<double>();
  c.rounding_threshold = j.at("rounding").get<double>();
  c.noise_std0 = j.at("noise_std0").get<double>();
  c.noise_decay = j.at("noise_decay").get<double>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_eps = j.at("adam_eps").get<double>();
}

int run_synth(SynthOptions opt) {
  if (!opt.replay.empty()) {
    std::ifstream in(opt.replay);
    if (!in) throw std::runtime_error("cannot open manifest '" + opt.replay + "'");
    json m = json::parse(in);
    opt.graph_path = m.at("graph").get<std::string>();
    opt.mem_spec = m.at("mem").get<std::string>();
    config_from_json(m.at("config"), opt.cfg);
    opt.cfg.seed = m.at("seed").get<unsigned long long>();
    opt.trials = m.at("trials").get<int>();
    opt.jobs = m.at("jobs").get<int>();
    opt.baseline = m.at("baseline").is_null() ? "" : m.at("baseline").get<std::string>();
    if (!opt.out_dir_given) opt.out_dir = m.at("out_dir").get<std::string>();
  }

  PatrollingGraph g = load_graph(opt.graph_path);
  std::vector<int> mem = parse_mem_spec(opt.mem_spec, g);
  fs::create_directories(opt.out_dir);

  double baseline_value = 0.0;
  bool has_baseline = !opt.baseline.empty();
  if (opt.baseline == "airport") baseline_value = airport_baseline(g);
  else if (has_baseline) baseline_value = std::stod(opt.baseline);

  opt.cfg.exec = opt.serial ? Exec::serial : Exec::parallel;

  struct TrialOutcome {
    bool ok = false;
    std::string error;
    TrialSummary summary;
  };
  std::vector<TrialOutcome> outcomes(opt.trials);

  auto run_trial = [&](int trial, Exec exec) {
    OptimizerConfig cfg = opt.cfg;
    cfg.seed = opt.cfg.seed + static_cast<unsigned long long>(trial);
    cfg.exec = exec;
    SynthesisResult res = synthesize(g, mem, cfg);
    write_trace_csv(res.trace, (fs::path(opt.out_dir) / trial_name("trace", trial, "csv")).string());
    save_strategy(res.best, g, (fs::path(opt.out_dir) / trial_name("strategy", trial, "json")).string());
    TrialSummary row;
    row.trial = trial;
    row.best_value = res.best_value;
    row.best_step = res.best_step;
    row.mean_step_seconds = res.mean_step_seconds;
    if (has_baseline) row.normalized_value = res.best_value / baseline_value;
    outcomes[trial] = {true, "", row};
  };

  if (opt.jobs <= 1) {
    for (int t = 0; t < opt.trials; ++t) {
      try {
        run_trial(t, opt.cfg.exec);
      } catch (const std::exception& e) {
        outcomes[t] = {false, e.what(), {}};
      }
    }
  } else {
    // trials are the parallel unit here; keep the inner kernels serial so the
    // workers do not fight over threads
    std::atomic<int> next{0};
    auto worker = [&] {
      while (true) {
        int t = next.fetch_add(1);
        if (t >= opt.trials) return;
        try {
          run_trial(t, Exec::serial);
        } catch (const std::exception& e) {
          outcomes[t] = {false, e.what(), {}};
        }
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < opt.jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialSummary> rows;
  int best_trial = -1;
  for (int t = 0; t < opt.trials; ++t) {
    if (!outcomes[t].ok) continue;
    rows.push_back(outcomes[t].summary);
    if (best_trial < 0 || outcomes[t].summary.best_value < outcomes[best_trial].summary.best_value)
      best_trial = t;
  }
  write_summary_csv(rows, has_baseline, (fs::path(opt.out_dir) / "summary.csv").string());

  json manifest;
  manifest["command"] = "synth";
  manifest["graph"] = fs::absolute(opt.graph_path).string();
  manifest["mem"] = opt.mem_spec;
  manifest["config"] = config_json(opt.cfg);
  manifest["seed"] = opt.cfg.seed;
  manifest["trials"] = opt.trials;
  manifest["jobs"] = opt.jobs;
  manifest["baseline"] = has_baseline ? json(opt.baseline) : json();
  manifest["out_dir"] = fs::absolute(opt.out_dir).string();
  json tfiles = json::array();
  for (int t = 0; t < opt.trials; ++t)
    tfiles.push_back({{"trial", t},
                      {"seed", opt.cfg.seed + static_cast<unsigned long long>(t)},
                      {"trace", trial_name("trace", t, "csv")},
                      {"strategy", trial_name("strategy", t, "json")},
                      {"completed", outcomes[t].ok}});
  manifest["outputs"] = {{"summary", "summary.csv"}, {"trials", tfiles}};
  {
    std::ofstream mf(fs::path(opt.out_dir) / "manifest.json");
    mf << manifest.dump(2) << "\n";
  }

  if (best_trial >= 0) {
    // re-evaluate the winner so the report lands next to the strategy
    RegularStrategy best = load_strategy(
        (fs::path(opt.out_dir) / trial_name("strategy", best_trial, "json")).string(), g);
    EvaluationReport rep = evaluate(best, g, opt.cfg.exec);
    save_strategy(best, g, (fs::path(opt.out_dir) / "best_strategy.json").string());
    save_report(rep, best, g, (fs::path(opt.out_dir) / "best_report.json").string());
  }

  bool all_ok = true;
  for (int t = 0; t < opt.trials; ++t) {
    if (outcomes[t].ok) {
      const auto& s = outcomes[t].summary;
      std::cout << "trial " << t << ": best " << format_value(s.best_value) << " at step "
                << s.best_step << " (" << s.mean_step_seconds << " s/step)\n";
    } else {
      std::cerr << "trial " << t << " failed: " << outcomes[t].error << "\n";
      all_ok = false;
    }
  }
  if (best_trial >= 0)
    std::cout << "best overall: trial " << best_trial << ", value "
              << format_value(outcomes[best_trial].summary.best_value) << ", outputs in "
              << opt.out_dir << "\n";
  return all_ok ? 0 : 1;
}

int run_eval(const std::string& graph_path, const std::string& strategy_path,
             const std::string& out, bool serial) {
  PatrollingGraph g = load_graph(graph_path);
  RegularStrategy s = load_strategy(strategy_path, g);
  EvaluationReport rep = evaluate(s, g, serial ? Exec::serial : Exec::parallel);
  if (out.empty()) std::cout << report_to_json(rep, s, g) << "\n";
  else save_report(rep, s, g, out);
  return 0;
}

int run_oracle(const std::string& graph_path, const std::string& strategy_path, long long samples,
               double horizon, unsigned long long seed, const std::string& out) {
  PatrollingGraph g = load_graph(graph_path);
  RegularStrategy s = load_strategy(strategy_path, g);
  EvaluationReport rep = evaluate(s, g, Exec::parallel);

  // hitting times: LU path vs fixed-point iteration, every component/target
  double max_diff = 0.0;
  for (int ci : rep.decomposition.bottom_ids) {
    const auto& members = rep.decomposition.components[ci];
    for (int ti = 0; ti < g.target_count(); ++ti) {
      HittingTimeVector direct = solve_hitting(s, members, g.targets[ti]);
      HittingTimeVector iter = value_iteration_hitting(s, members, g.targets[ti]);
      if (direct.reachable != iter.reachable)
        throw std::runtime_error("oracle: reachability disagreement");
      if (!direct.reachable) continue;
      for (size_t i = 0; i < direct.y.size(); ++i)
        max_diff = std::max(max_diff, std::abs(direct.y[i] - iter.y[i]));
    }
  }

  json j;
  j["value"] = is_infinite(rep.value) ? json("inf") : json(rep.value);
  j["value_iteration_max_diff"] = max_diff;
  bool ok = max_diff <= 1e-8;

  const WitnessEntry& w = rep.witness[rep.best_component];
  if (!is_infinite(w.damage)) {
    MonteCarloEstimate mc = monte_carlo_damage(s, g, w.edge, w.target_vertex, samples, horizon, seed);
    double gap = std::abs(mc.mean - w.damage);
    bool within = mc.used > 0 && gap <= 3.0 * mc.std_error;
    j["monte_carlo"] = {{"exact", w.damage},        {"mean", mc.mean},
                        {"std_error", mc.std_error}, {"samples_used", mc.used},
                        {"truncated", mc.truncated}, {"horizon", mc.horizon},
                        {"within_3_std_errors", within}};
    ok = ok && within;
  } else {
    j["monte_carlo"] = "skipped (witness damage is inf)";
  }
  j["ok"] = ok;

  if (out.empty()) std::cout << j.dump(2) << "\n";
  else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write '" + out + "'");
    f << j.dump(2) << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-memory patrolling strategies: generate, synthesize, evaluate, cross-check"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance graph");
  gen->require_subcommand(1);
  int grid_n = 10;
  unsigned long long grid_seed = 1;
  std::string gen_out = "graph.json";
  auto* grid = gen->add_subcommand("grid", "random grid instance");
  grid->add_option("--n", grid_n, "number of vertices (sampled from an n x n grid)");
  grid->add_option("--seed", grid_seed, "sampling seed");
  grid->add_option("--out", gen_out, "output graph file");
  std::string gates_spec;
  auto* airport = gen->add_subcommand("airport", "center/halls/gates instance");
  airport->add_option("--gates", gates_spec, "per-terminal gate counts, e.g. 4,2,6")->required();
  airport->add_option("--out", gen_out, "output graph file");

  // synth
  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "synthesize a strategy by gradient descent");
  synth->add_option("--graph", so.graph_path, "instance graph file");
  synth->add_option("--mem", so.mem_spec, "memory spec, e.g. default=6 or targets=1,halls=4");
  synth->add_option("--steps", so.cfg.steps, "optimizer steps per trial");
  synth->add_option("--trials", so.trials, "independent trials (seed = --seed + trial)");
  synth->add_option("--seed", so.cfg.seed, "base seed");
  synth->add_option("--jobs", so.jobs, "worker threads across trials");
  synth->add_option("--eps", so.cfg.eps, "ramp width of the soft penalty");
  synth->add_option("--beta", so.cfg.beta, "entropy regularizer weight");
  synth->add_option("--lr", so.cfg.learning_rate, "Adam learning rate");
  synth->add_option("--cutoff", so.cfg.cutoff_threshold, "support pruning threshold");
  synth->add_option("--rounding", so.cfg.rounding_threshold, "snap-to-endpoint threshold");
  synth->add_option("--noise-std0", so.cfg.noise_std0, "initial gradient noise std");
  synth->add_option("--noise-decay", so.cfg.noise_decay, "per-step noise decay factor");
  synth->add_option("--baseline", so.baseline, "number or 'airport'; adds normalized_value to the summary");
  auto* out_opt = synth->add_option("--out", so.out_dir, "output directory");
  synth->add_option("--replay", so.replay, "manifest.json to re-run exactly");
  synth->add_flag("--serial", so.serial, "force serial kernels");

  // eval
  std::string eval_graph, eval_strategy, eval_out;
  bool eval_serial = false;
  auto* eval = app.add_subcommand("eval", "evaluate a strategy exactly");
  eval->add_option("--graph", eval_graph, "instance graph file")->required();
  eval->add_option("--strategy", eval_strategy, "strategy file")->required();
  eval->add_option("--out", eval_out, "report file (stdout when omitted)");
  eval->add_flag("--serial", eval_serial, "force serial kernels");

  // oracle
  std::string or_graph, or_strategy, or_out;
  long long or_samples = 200000;
  double or_horizon = 0.0;
  unsigned long long or_seed = 1;
  auto* oracle = app.add_subcommand("oracle", "cross-check the evaluator on one strategy");
  oracle->add_option("--graph", or_graph, "instance graph file")->required();
  oracle->add_option("--strategy", or_strategy, "strategy file")->required();
  oracle->add_option("--samples", or_samples, "Monte Carlo sample count");
  oracle->add_option("--horizon", or_horizon, "walk cutoff in time units (0 = auto)");
  oracle->add_option("--seed", or_seed, "Monte Carlo seed");
  oracle->add_option("--out", or_out, "report file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (grid->parsed()) {
      save_graph(gen_grid(grid_n, grid_seed), gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }
    if (airport->parsed()) {
      save_graph(gen_airport(parse_gates(gates_spec)), gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }
    if (synth->parsed()) {
      if (so.replay.empty() && so.graph_path.empty())
        throw std::runtime_error("synth needs --graph (or --replay)");
      so.out_dir_given = out_opt->count() > 0;
      return run_synth(so);
    }
    if (eval->parsed()) return run_eval(eval_graph, eval_strategy, eval_out, eval_serial);
    if (oracle->parsed()) return run_oracle(or_graph, or_strategy, or_samples, or_horizon, or_seed, or_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
