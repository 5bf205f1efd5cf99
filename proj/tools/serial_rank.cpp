#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "serial/error.hpp"
#include "serial/generator.hpp"
#include "serial/parallel.hpp"
#include "serial/report.hpp"

namespace fs = std::filesystem;
using namespace serial;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kNonConvergence = 3 };

struct Common {
  std::string netlist;
  std::string lib;
  std::string out;
  unsigned threads = 0;
};

struct Propagation {
  double eps = 0.01;
  int max_iters = 100;
  std::vector<std::string> clk, reset;
  std::string weights = "uniform";
};

struct Sim {
  std::uint64_t cycles = 10000;
  std::uint64_t seed = 1;
  std::string initial = "zero";
  std::string trace;
  double flip_rate = 1e-3;
};

class Run {
 public:
  Run(CLI::App* sub, const Common& common) : sub_(sub), common_(common), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& path) {
    if (!path.empty()) manifest_.inputs.push_back(path);
  }
  void seed(std::uint64_t s) { manifest_.seeds.push_back(s); }

  void write(const std::string& name, const std::string& content) {
    if (common_.out.empty()) {
      std::cout << content;
      return;
    }
    fs::create_directories(common_.out);
    std::ofstream f(fs::path(common_.out) / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (fs::path(common_.out) / name).string());
    f << content;
    manifest_.outputs.push_back(name);
  }

  void finish() {
    if (common_.out.empty()) return;
    manifest_.subcommand = sub_->get_name();
    for (const auto* opt : sub_->get_options()) {
      if (opt->get_name() == "--help") continue;
      std::string value;
      if (opt->count() > 0) {
        for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
      } else {
        value = opt->get_default_str();
      }
      manifest_.flags.emplace_back(opt->get_name(), value);
    }
    manifest_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    fs::create_directories(common_.out);
    std::ofstream f(fs::path(common_.out) / "manifest.json", std::ios::binary);
    f << cli::manifest_json(manifest_);
  }

 private:
  CLI::App* sub_;
  const Common& common_;
  std::chrono::steady_clock::time_point start_;
  cli::RunManifest manifest_;
};

GateLibrary load_library(const std::string& path) {
  return path.empty() ? GateLibrary{} : parse_gate_library(read_file(path));
}

Netlist load_netlist(const Common& c, const GateLibrary& lib) { return parse_bench_file(c.netlist, &lib); }

RankOptions rank_options(const Propagation& p, unsigned threads) {
  RankOptions o;
  o.procedure1.eps_threshold = o.procedure2.eps_threshold = p.eps;
  o.procedure1.max_iters = o.procedure2.max_iters = p.max_iters;
  o.clk_reset.insert(p.clk.begin(), p.clk.end());
  o.clk_reset.insert(p.reset.begin(), p.reset.end());
  o.weights = p.weights == "pow2" ? WeightMode::Pow2 : WeightMode::Uniform;
  o.threads = resolve_threads(threads);
  return o;
}

std::vector<std::vector<std::uint8_t>> read_trace(const std::string& path, const Netlist& nl) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error("trace file is empty");
  std::vector<std::size_t> column_of_input(nl.inputs().size(), SIZE_MAX);
  {
    std::stringstream ss(line);
    std::size_t col = 0;
    for (std::string name; std::getline(ss, name, ','); ++col) {
      bool found = false;
      for (std::size_t i = 0; i < nl.inputs().size(); ++i)
        if (nl.net_name(nl.inputs()[i]) == name) column_of_input[i] = col, found = true;
      if (!found) throw Error("trace column '" + name + "' is not an input");
    }
  }
  for (auto c : column_of_input)
    if (c == SIZE_MAX) throw Error("trace header must name every input");
  std::vector<std::vector<std::uint8_t>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::uint8_t> values;
    std::stringstream ss(line);
    for (std::string v; std::getline(ss, v, ',');) {
      if (v != "0" && v != "1") throw Error("trace row " + std::to_string(rows.size() + 2) + ": values must be 0 or 1");
      values.push_back(v == "1");
    }
    if (values.size() != column_of_input.size())
      throw Error("trace row " + std::to_string(rows.size() + 2) + ": wrong number of columns");
    std::vector<std::uint8_t> row(nl.inputs().size());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = values[column_of_input[i]];
    rows.push_back(std::move(row));
  }
  return rows;
}

SimConfig sim_config(const Sim& s, const Netlist& nl, bool cycles_given) {
  SimConfig cfg;
  cfg.cycles = s.cycles;
  cfg.rng_seed = s.seed;
  cfg.initial_state = s.initial == "random" ? InitialState::Random : InitialState::Zero;
  if (!s.trace.empty()) {
    cfg.stimulus = Stimulus::Trace;
    cfg.trace = read_trace(s.trace, nl);
    if (!cycles_given) cfg.cycles = cfg.trace.size();
  }
  return cfg;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, sep);)
    if (!p.empty()) parts.push_back(p);
  return parts;
}

std::uint32_t flipflop_by_name(const Netlist& nl, const std::string& name) {
  for (std::uint32_t f = 0; f < nl.flipflops().size(); ++f)
    if (nl.flipflops()[f].name == name) return f;
  throw Error("unknown flip-flop '" + name + "'");
}

void add_common(CLI::App* sub, Common& c, bool netlist = true) {
  if (netlist) sub->add_option("netlist", c.netlist, "Netlist in .bench format")->required()->check(CLI::ExistingFile);
  sub->add_option("--lib", c.lib, "JSON library of custom gate types")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory (manifest.json and results)");
  sub->add_option("--threads", c.threads, "Worker threads (default: SERIAL_RANK_THREADS or all cores)");
}

void add_propagation(CLI::App* sub, Propagation& p) {
  sub->add_option("--eps", p.eps, "Convergence threshold for both procedures")->capture_default_str();
  sub->add_option("--max-iters", p.max_iters, "Iteration cap for both procedures")->capture_default_str();
  sub->add_option("--clk", p.clk, "Clock input (confidence 0)")->delimiter(',');
  sub->add_option("--reset", p.reset, "Reset input (confidence 0)")->delimiter(',');
  sub->add_option("--weights", p.weights, "Output initialization")
      ->check(CLI::IsMember({"uniform", "pow2"}))
      ->capture_default_str();
}

void add_sim(CLI::App* sub, Sim& s) {
  sub->add_option("--cycles", s.cycles, "Simulated clock cycles")->capture_default_str();
  sub->add_option("--seed", s.seed, "Base RNG seed")->capture_default_str();
  sub->add_option("--initial", s.initial, "Initial flip-flop state")
      ->check(CLI::IsMember({"zero", "random"}))
      ->capture_default_str();
  sub->add_option("--trace", s.trace, "Stimulus CSV with one column per input")->check(CLI::ExistingFile);
}

Ranking ranking_for(const Netlist& nl, const std::string& ranking_path, const Propagation& p, unsigned threads,
                    Run& run) {
  if (!ranking_path.empty()) {
    run.input(ranking_path);
    return parse_ranking_csv(read_file(ranking_path), EndpointIndex(nl));
  }
  return run_rank(nl, rank_options(p, threads)).ranking;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Flip-flop significance ranking, fault simulation and selective hardening"};
  app.set_version_flag("--version", cli::kToolVersion);
  app.require_subcommand(1);

  Common common;
  Propagation prop;
  Sim sim;

  auto* stats_cmd = app.add_subcommand("stats", "Netlist statistics");
  add_common(stats_cmd, common);

  std::vector<std::string> kinds;
  std::vector<int> fanins{2, 3, 4};
  auto* ldf_cmd = app.add_subcommand("ldf-table", "Influence vectors of gate kinds as CSV");
  add_common(ldf_cmd, common, false);
  ldf_cmd->add_option("--kind", kinds, "Gate kinds or library gate names (default: all)")->delimiter(',');
  ldf_cmd->add_option("--fanin", fanins, "Fan-ins for built-in kinds")->delimiter(',')->capture_default_str();

  auto* df_cmd = app.add_subcommand("df", "Distribution-factor matrix");
  add_common(df_cmd, common);
  add_propagation(df_cmd, prop);

  auto* rank_cmd = app.add_subcommand("rank", "Rank flip-flops and inputs by significance");
  add_common(rank_cmd, common);
  add_propagation(rank_cmd, prop);

  std::string victims, forced, ranking_path;
  std::size_t group_size = 0;
  unsigned seeds = 10;
  auto* sim_cmd = app.add_subcommand("simulate", "Fault-injection simulation against a golden twin");
  add_common(sim_cmd, common);
  add_sim(sim_cmd, sim);
  add_propagation(sim_cmd, prop);
  sim_cmd->add_option("--flip-rate", sim.flip_rate, "Per-cycle flip probability of each victim")->capture_default_str();
  sim_cmd->add_option("--victims", victims, "Comma-separated victim flip-flops (default: all)");
  sim_cmd->add_option("--force", forced, "Comma-separated FF@CYCLE flips");
  sim_cmd->add_option("--group-size", group_size, "Run the ranked group experiment with this group size");
  sim_cmd->add_option("--seeds", seeds, "Seeds per group")->capture_default_str();
  sim_cmd->add_option("--ranking", ranking_path, "Ranking CSV (default: computed)")->check(CLI::ExistingFile);

  std::vector<double> coverages{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> flip_rates{1e-3};
  std::string policy = "both";
  unsigned harden_seeds = 20;
  auto* harden_cmd = app.add_subcommand("harden", "Selective-hardening sweep");
  add_common(harden_cmd, common);
  add_sim(harden_cmd, sim);
  add_propagation(harden_cmd, prop);
  harden_cmd->add_option("--coverage", coverages, "Hardened fractions of the flip-flops")->delimiter(',')->capture_default_str();
  harden_cmd->add_option("--flip-rate", flip_rates, "Flip rates")->delimiter(',')->capture_default_str();
  harden_cmd->add_option("--policy", policy, "Selection policy")
      ->check(CLI::IsMember({"serial", "random", "both"}))
      ->capture_default_str();
  harden_cmd->add_option("--seeds", harden_seeds, "Seeds per cell")->capture_default_str();
  harden_cmd->add_option("--ranking", ranking_path, "Ranking CSV (default: computed)")->check(CLI::ExistingFile);

  OracleLimits limits;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Cross-check against the independent oracles");
  add_common(oracle_cmd, common);
  oracle_cmd->add_option("--max-cone-gates", limits.max_cone_gates, "Path-enumeration cone limit")
      ->capture_default_str();
  oracle_cmd->add_option("--max-nodes", limits.max_linear_nodes, "Linear-system size limit (FFs + inputs)")
      ->capture_default_str();
  oracle_cmd->add_option("--cycles", limits.sim_cycles, "Simulator cross-check cycles")->capture_default_str();

  GeneratorSpec spec;
  bool no_loops = false;
  auto* gen_cmd = app.add_subcommand("generate", "Write a seeded synthetic circuit");
  add_common(gen_cmd, common, false);
  gen_cmd->add_option("--inputs", spec.inputs)->capture_default_str();
  gen_cmd->add_option("--outputs", spec.outputs)->capture_default_str();
  gen_cmd->add_option("--ffs", spec.flipflops)->capture_default_str();
  gen_cmd->add_option("--gates", spec.gates)->capture_default_str();
  gen_cmd->add_option("--degree", spec.degree, "Target endpoints per cone")->capture_default_str();
  gen_cmd->add_option("--max-fanin", spec.max_fanin)->capture_default_str();
  gen_cmd->add_option("--reuse", spec.reuse_probability, "Chance a cone reuses an earlier gate")
      ->capture_default_str();
  gen_cmd->add_option("--seed", spec.seed)->capture_default_str();
  gen_cmd->add_flag("--no-loops", no_loops, "Keep the flip-flop graph acyclic");

  if (argc <= 1) {
    std::cerr << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const unsigned threads = resolve_threads(common.threads);
  const auto lib = load_library(common.lib);
  CLI::App* sub = app.get_subcommands().front();
  Run run(sub, common);
  run.input(common.netlist);
  run.input(common.lib);

  if (sub == stats_cmd) {
    const auto nl = load_netlist(common, lib);
    PropagationOptions p1;
    p1.throw_on_nonconvergence = false;
    const auto dfc = procedure1_all(nl, p1, threads);
    run.write("stats.json", stats_json(nl, stats(nl, build_significance_graph(nl, dfc.df))));
  } else if (sub == ldf_cmd) {
    std::string csv = "kind,fanin,input_index,raw,ldf\n";
    if (kinds.empty()) {
      kinds = {"AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUF", "MUX"};
      for (const auto& [name, table] : lib.gates()) kinds.push_back(name);
    }
    for (const auto& k : kinds) {
      if (const auto* table = lib.find(k)) {
        csv += ldf_csv(k, influence(*table));
        continue;
      }
      const auto kind = gate_kind_from_string(k);
      if (!kind || *kind == GateKind::Custom) throw Error("unknown gate kind '" + k + "'");
      if (*kind == GateKind::Not || *kind == GateKind::Buf) {
        csv += ldf_csv(std::string(to_string(*kind)), influence(TruthTable::of(*kind, 1)));
      } else if (*kind == GateKind::Mux) {
        csv += ldf_csv("MUX", influence(TruthTable::of(*kind, 3)));
      } else {
        for (int n : fanins) {
          if (n < 1 || n > kMaxCustomFanin) throw Error("fan-in must be in [1, 16]");
          csv += ldf_csv(std::string(to_string(*kind)), influence(TruthTable::of(*kind, n)));
        }
      }
    }
    run.write("ldf.csv", csv);
  } else if (sub == df_cmd) {
    const auto nl = load_netlist(common, lib);
    auto opts = rank_options(prop, threads);
    const auto dfc = procedure1_all(nl, opts.procedure1, threads);
    const auto graph = build_significance_graph(nl, dfc.df, opts.clk_reset);
    run.write("df.csv", df_csv(graph));
    if (!common.out.empty()) run.write("df_convergence.csv", df_convergence_csv(graph.index(), dfc));
  } else if (sub == rank_cmd) {
    const auto nl = load_netlist(common, lib);
    const auto result = run_rank(nl, rank_options(prop, threads));
    run.write("ranking.csv", ranking_csv(result.ranking));
    if (!common.out.empty())
      run.write("convergence.json", convergence_json(result.significance.report, result.residual));
  } else if (sub == sim_cmd) {
    const auto nl = load_netlist(common, lib);
    const auto cfg = sim_config(sim, nl, sim_cmd->count("--cycles") > 0);
    run.input(sim.trace);
    if (group_size > 0) {
      const auto ranking = ranking_for(nl, ranking_path, prop, threads, run);
      for (unsigned s = 0; s < seeds; ++s) run.seed(cfg.rng_seed + s);
      const auto groups = group_experiment(nl, ranking, group_size, sim.flip_rate, cfg, seeds, threads);
      run.write("groups.csv", groups_csv(nl, groups));
      if (groups.size() >= 3) {
        std::string rho;
        try {
          rho = format_double(significance_coherence(groups));
        } catch (const DegenerateInput&) {
          rho = "null";
        }
        if (!common.out.empty()) run.write("coherence.json", "{\n  \"spearman_rho\": " + rho + "\n}\n");
      }
    } else {
      FaultConfig fault;
      fault.flip_rate = sim.flip_rate;
      fault.rng_seed = cfg.rng_seed;
      if (victims.empty()) {
        for (std::uint32_t f = 0; f < nl.flipflops().size(); ++f) fault.victims.push_back(f);
      } else {
        for (const auto& name : split(victims, ',')) fault.victims.push_back(flipflop_by_name(nl, name));
      }
      for (const auto& item : split(forced, ',')) {
        const auto at = item.find('@');
        if (at == std::string::npos) throw Error("--force expects FF@CYCLE, got '" + item + "'");
        fault.forced.push_back({flipflop_by_name(nl, item.substr(0, at)), std::stoull(item.substr(at + 1))});
      }
      run.seed(cfg.rng_seed);
      run.write("mismatch.csv", mismatch_csv(nl, simulate(nl, cfg, fault).report));
    }
  } else if (sub == harden_cmd) {
    const auto nl = load_netlist(common, lib);
    const auto cfg = sim_config(sim, nl, harden_cmd->count("--cycles") > 0);
    run.input(sim.trace);
    const auto ranking = ranking_for(nl, ranking_path, prop, threads, run);
    for (unsigned s = 0; s < harden_seeds; ++s) run.seed(cfg.rng_seed + s);
    std::vector<SweepRow> rows;
    for (auto p : {HardeningPolicy::SerialTop, HardeningPolicy::Random}) {
      if (policy != "both" && policy != to_string(p)) continue;
      const auto part = sweep(nl, ranking, coverages, flip_rates, p, cfg, harden_seeds, threads);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    run.write("harden.csv", sweep_csv(rows));
  } else if (sub == oracle_cmd) {
    const auto nl = load_netlist(common, lib);
    const auto report = oracle_check(nl, limits, threads);
    run.write("oracle.csv", oracle_csv(report));
    run.finish();
    return report.all_passed() ? kOk : kInvalid;
  } else if (sub == gen_cmd) {
    spec.loops = !no_loops;
    run.seed(spec.seed);
    run.write("circuit.bench", to_bench(generate(spec)));
  }
  run.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
}
