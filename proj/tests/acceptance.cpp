// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "serial/generator.hpp"
#include "serial/influence.hpp"
#include "serial/oracle.hpp"
#include "serial/parallel.hpp"
#include "serial/report.hpp"

using namespace serial;
namespace fs = std::filesystem;

namespace {

const char* const kBundled[] = {"shift2", "loop", "reconvergent", "counter2", "s27", "gen_seq"};

Netlist fixture(const std::string& name) {
  return parse_bench_file(std::string(SERIAL_FIXTURE_DIR) + "/" + name + ".bench");
}

SignificanceGraph graph_of(const Netlist& nl) { return build_significance_graph(nl, procedure1_all(nl).df); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Outcome worked_example() {
  Outcome o;
  const auto graph = graph_of(fixture("loop"));
  const auto f7 = *graph.index().find(NodeKind::FlipFlop, "F7");
  Eigen::VectorXd s_out(2);
  s_out << 1.0, 2.0;
  std::vector<double> trace;
  PropagationOptions opts;
  opts.eps_threshold = 1e-12;
  opts.max_iters = 10000;
  const auto r = procedure2(graph, s_out, opts, [&](int, const Eigen::VectorXd& s) { trace.push_back(s[f7]); });
  o.check(trace.size() >= 2 && trace[0] == 1.25, "iteration 1 gives " + fmt(trace.empty() ? NAN : trace[0]));
  o.check(trace.size() >= 2 && trace[1] == 1.3125, "iteration 2 gives " + fmt(trace.size() < 2 ? NAN : trace[1]));
  o.check(std::abs(r.s[f7] - 4.0 / 3.0) <= 1e-6, "limit " + fmt(r.s[f7]));
  o.note("S_F7: 1.25, 1.3125, ..., " + fmt(r.s[f7]) + " after " + std::to_string(r.report.iterations) + " iterations");
  return o;
}

Outcome influence_fidelity() {
  Outcome o;
  const auto and3 = influence(TruthTable::of(GateKind::And, 3));
  for (double v : and3.ldf) o.check(v == 1.0 / 3.0, "AND3 ldf " + fmt(v));
  int compared = 0;
  for (auto kind : {GateKind::And, GateKind::Nand, GateKind::Or, GateKind::Nor, GateKind::Xor, GateKind::Xnor,
                    GateKind::Not, GateKind::Buf}) {
    const int max_n = (kind == GateKind::Not || kind == GateKind::Buf) ? 1 : 8;
    for (int n = 1; n <= max_n; ++n) {
      const auto exact = influence(TruthTable::of(kind, n));
      const auto closed = influence_symmetric(kind, n);
      for (int i = 0; i < n; ++i)
        o.check(std::abs(exact.ldf[i] - closed.ldf[i]) < 1e-15 && std::abs(exact.raw[i] - closed.raw[i]) < 1e-15,
                std::string(to_string(kind)) + std::to_string(n));
      ++compared;
    }
  }
  const auto mux = influence(TruthTable::of(GateKind::Mux, 3));
  for (double v : mux.ldf) o.check(std::abs(v - 1.0 / 3.0) < 1e-15, "MUX ldf " + fmt(v));
  o.note(std::to_string(compared) + " kind/fan-in pairs compared");
  return o;
}

Outcome procedure1_bound() {
  Outcome o;
  for (const char* name : kBundled) {
    const auto nl = fixture(name);
    const int bound = std::max(1, levelize(nl).max_depth);
    PropagationOptions exact;
    exact.eps_threshold = 0.0;
    exact.max_iters = bound;
    exact.throw_on_nonconvergence = false;
    const auto dfc = procedure1_all(nl, exact);
    int worst = 0;
    for (const auto& r : dfc.reports) {
      o.check(r.converged && r.final_eps() == 0.0, std::string(name) + " cone not exact within " + std::to_string(bound));
      worst = std::max(worst, r.iterations);
    }
    o.note(std::string(name) + " " + std::to_string(worst) + "/" + std::to_string(bound));
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::vector<std::pair<std::string, Netlist>> circuits;
  for (const char* name : kBundled) circuits.emplace_back(name, fixture(name));
  for (std::size_t gates : {1000u, 10000u}) {
    GeneratorSpec spec;
    spec.gates = gates;
    spec.flipflops = gates / 10;
    spec.inputs = 32;
    spec.outputs = 16;
    spec.degree = 6;
    spec.seed = gates;
    circuits.emplace_back("generated-" + std::to_string(gates), generate(spec));
  }
  double worst_p2 = 0.0, worst_p1 = 0.0;
  std::size_t cones = 0;
  for (const auto& [name, nl] : circuits) {
    const EndpointIndex index(nl);
    if (index.flipflops() + index.inputs() > 5000) continue;
    OracleLimits limits;
    const auto report = oracle_check(nl, limits, resolve_threads());
    for (const auto& r : report.outcomes) {
      if (r.name == "simulate_vs_reference") continue;
      o.check(r.skipped || r.passed, name + " " + r.name + " deviation " + fmt(r.max_deviation));
      if (r.name == "procedure2_vs_direct_solve") {
        o.check(!r.skipped, name + " direct solve skipped");
        worst_p2 = std::max(worst_p2, r.max_deviation);
      } else {
        worst_p1 = std::max(worst_p1, r.max_deviation);
      }
    }
    for (std::uint32_t h = 0; h < index.outputs() + index.flipflops(); ++h)
      cones += cone_gate_count(nl, index, h) <= limits.max_cone_gates;
  }
  o.note("max relative deviation " + fmt(worst_p2) + ", max df deviation " + fmt(worst_p1) + " over " +
         std::to_string(cones) + " cones");
  return o;
}

Outcome convergence_behaviour() {
  Outcome o;
  for (const char* name : kBundled) {
    const auto graph = graph_of(fixture(name));
    PropagationOptions opts;
    opts.eps_threshold = 0.01;
    opts.max_iters = 40;
    opts.throw_on_nonconvergence = false;
    const auto r = procedure2(graph, output_weights(graph.index(), WeightMode::Uniform), opts);
    o.check(r.report.converged, std::string(name) + " eps " + fmt(r.report.final_eps()) + " after 40");
    o.note(std::string(name) + " " + std::to_string(r.report.iterations));
  }
  return o;
}

Outcome scalability() {
  Outcome o;
  RankOptions opts;
  opts.threads = resolve_threads();
  struct Point {
    std::size_t gates;
    double seconds;
    double cost;
  };
  std::vector<Point> points;
  for (std::size_t gates : {5000u, 25000u, 50000u, 100000u}) {
    GeneratorSpec spec;
    spec.gates = gates;
    spec.flipflops = gates / 8;
    spec.inputs = 64;
    spec.outputs = 64;
    spec.degree = 12;
    spec.seed = 2024;
    const auto nl = generate(spec);
    double secs = INFINITY;
    std::optional<RankRun> run;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      run.emplace(run_rank(nl, opts));
      secs = std::min(secs, seconds_since(t0));
    }
    const auto cost = estimate_cost(run->stats, run->df.mean_iterations, run->significance.report.iterations);
    if (gates == 50000) {
      o.check(secs < 60.0, "50k gates took " + fmt(secs) + " s");
      o.check(std::abs(run->stats.degree_node - 12.0) <= 0.3 * 12.0, "degree " + fmt(run->stats.degree_node));
      o.note("50k gates " + fmt(secs) + " s (degree " + fmt(run->stats.degree_node) + ")");
      continue;
    }
    points.push_back({gates, secs, cost.t1_units + cost.t2_units});
    o.note(std::to_string(gates) + " gates " + fmt(secs) + " s, cost " + fmt(cost.t1_units + cost.t2_units));
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    o.check((points[i].seconds > points[i - 1].seconds) == (points[i].cost > points[i - 1].cost),
            "time order differs from cost order at " + std::to_string(points[i].gates));
  }
  return o;
}

Ranking ranking_of(const Netlist& nl) { return run_rank(nl).ranking; }

Outcome coherence() {
  Outcome o;
  SimConfig sim;
  sim.cycles = 20000;
  const std::pair<const char*, std::size_t> cases[] = {{"s27", 1}, {"gen_seq", 3}};
  for (const auto& [name, group] : cases) {
    const auto nl = fixture(name);
    const auto groups = group_experiment(nl, ranking_of(nl), group, 1e-3, sim, 10, resolve_threads());
    const double rho = significance_coherence(groups);
    o.check(rho >= 0.5, std::string(name) + " rho " + fmt(rho));
    o.note(std::string(name) + " rho " + fmt(rho) + " over " + std::to_string(groups.size()) + " groups");
  }
  GeneratorSpec spec;
  spec.gates = 600;
  spec.flipflops = 60;
  spec.inputs = 12;
  spec.outputs = 12;
  spec.degree = 5;
  spec.seed = 31;
  const auto nl = generate(spec);
  const auto groups = group_experiment(nl, ranking_of(nl), 6, 1e-3, sim, 10, resolve_threads());
  const double rho = significance_coherence(groups);
  o.check(rho >= 0.5, "generated-600 rho " + fmt(rho));
  o.note("generated-600 rho " + fmt(rho) + " over " + std::to_string(groups.size()) + " groups");
  return o;
}

Outcome hardening_benefit() {
  Outcome o;
  SimConfig sim;
  sim.cycles = 100000;  // about 100 flips per flip-flop and seed at rate 1e-3
  const std::vector<double> coverages{0.0, 0.25, 0.5, 0.75, 1.0};
  for (const char* name : kBundled) {
    const auto nl = fixture(name);
    const auto ranking = ranking_of(nl);
    const auto threads = resolve_threads();
    const auto top = sweep(nl, ranking, coverages, {1e-3}, HardeningPolicy::SerialTop, sim, 20, threads);
    const auto rnd = sweep(nl, ranking, {0.5}, {1e-3}, HardeningPolicy::Random, sim, 20, threads);
    o.check(top[2].mean_rate <= rnd[0].mean_rate,
            std::string(name) + " serial " + fmt(top[2].mean_rate) + " > random " + fmt(rnd[0].mean_rate));
    for (std::size_t i = 1; i < top.size(); ++i)
      o.check(top[i].mean_rate <= top[i - 1].mean_rate,
              std::string(name) + " rate rises at coverage " + fmt(coverages[i]));
    o.note(std::string(name) + " " + fmt(top[2].mean_rate) + " vs " + fmt(rnd[0].mean_rate));
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  const fs::path work = fs::current_path() / "acceptance_determinism";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string exe = SERIAL_RANK_EXE;
  auto sh = [&](const std::string& args) {
    const std::string cmd = "\"" + exe + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  o.check(sh("generate --gates 5000 --ffs 600 --inputs 32 --outputs 32 --degree 10 --seed 9 --out \"" +
             (work / "gen").string() + "\"") == 0,
          "generate failed");
  const auto circuit = (work / "gen" / "circuit.bench").string();
  std::vector<std::string> inputs{circuit};
  for (const char* name : kBundled) inputs.push_back(std::string(SERIAL_FIXTURE_DIR) + "/" + name + ".bench");
  int compared = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto dir = work / std::to_string(i);
    const std::string base = "rank \"" + inputs[i] + "\" --out \"" + dir.string();
    o.check(sh(base + "/a\" --threads 1") == 0 && sh(base + "/b\" --threads 1") == 0 &&
                sh(base + "/c\" --threads 8") == 0,
            "rank failed on " + inputs[i]);
    const auto a = slurp(dir / "a" / "ranking.csv");
    o.check(!a.empty() && a == slurp(dir / "b" / "ranking.csv"), "rerun differs on " + inputs[i]);
    o.check(!a.empty() && a == slurp(dir / "c" / "ranking.csv"), "threads 1 vs 8 differ on " + inputs[i]);
    ++compared;
  }
  o.note(std::to_string(compared) + " circuits, ranking.csv byte-identical");
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"worked-example fidelity", worked_example},
      {"influence fidelity", influence_fidelity},
      {"procedure-1 termination bound", procedure1_bound},
      {"oracle equivalence", oracle_equivalence},
      {"convergence behaviour", convergence_behaviour},
      {"scalability", scalability},
      {"rank-impact coherence", coherence},
      {"hardening benefit", hardening_benefit},
      {"determinism", determinism},
  };
  int failed = 0;
  int id = 0;
  for (const auto& [name, fn] : criteria) {
    ++id;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    std::printf("%s %d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", id - failed, id);
  return failed ? 1 : 0;
}
