#include "serial/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "serial/influence.hpp"

namespace serial {

RankRun run_rank(const Netlist& nl, const RankOptions& options) {
  RankRun run;
  run.index = EndpointIndex(nl);
  run.df = procedure1_all(nl, options.procedure1, options.threads);
  run.graph = build_significance_graph(nl, run.df.df, options.clk_reset);
  run.stats = stats(nl, run.graph);
  run.significance = procedure2(run.graph, output_weights(run.index, options.weights), options.procedure2);
  run.residual = residual(run.graph, run.significance.s);
  run.ranking = rank(run.index, run.significance.s);
  return run;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string ranking_csv(const Ranking& ranking) {
  std::string out = "rank,node,kind,significance\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const auto& e = ranking[i];
    out += std::to_string(i + 1) + "," + e.name + "," + std::string(to_string(e.kind)) + "," +
           format_double(e.significance) + "\n";
  }
  return out;
}

Ranking parse_ranking_csv(const std::string& text, const EndpointIndex& index) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line.rfind("rank,node,kind,significance", 0) != 0) throw Error("ranking CSV: unexpected header");
  Ranking ranking;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 4) throw Error("ranking CSV row " + std::to_string(row) + ": expected 4 columns");
    NodeKind kind;
    if (cols[2] == "ff") kind = NodeKind::FlipFlop;
    else if (cols[2] == "input") kind = NodeKind::Input;
    else throw Error("ranking CSV row " + std::to_string(row) + ": unknown kind '" + cols[2] + "'");
    const auto node = index.find(kind, cols[1]);
    if (!node) throw Error("ranking CSV row " + std::to_string(row) + ": unknown node '" + cols[1] + "'");
    double sig = 0.0;
    const auto res = std::from_chars(cols[3].data(), cols[3].data() + cols[3].size(), sig);
    if (res.ec != std::errc()) throw Error("ranking CSV row " + std::to_string(row) + ": bad significance");
    ranking.push_back({*node, cols[1], kind, sig});
  }
  return ranking;
}

namespace {

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string convergence_json(const ConvergenceReport& report, double residual) {
  nlohmann::ordered_json j;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["eps_trace"] = nlohmann::ordered_json::array();
  for (double e : report.eps_trace) j["eps_trace"].push_back(number_or_null(e));
  j["residual"] = number_or_null(residual);
  return j.dump(2) + "\n";
}

std::string df_csv(const SignificanceGraph& graph) {
  const auto& index = graph.index();
  std::string out = "head,tail,df,confidence\n";
  for (const auto& a : graph.arrows())
    out += index.name(a.head) + "," + index.name(a.tail) + "," + format_double(a.df) + "," +
           format_double(a.confidence) + "\n";
  return out;
}

std::string df_convergence_csv(const EndpointIndex& index, const DFComputation& df) {
  std::string out = "endpoint,kind,iterations,final_eps,converged,constant\n";
  std::size_t next_constant = 0;
  for (std::uint32_t h = 0; h < df.reports.size(); ++h) {
    const bool constant = next_constant < df.constant_cones.size() && df.constant_cones[next_constant] == h;
    if (constant) ++next_constant;
    const auto& r = df.reports[h];
    out += index.name(h) + "," + std::string(to_string(index.kind(h))) + "," + std::to_string(r.iterations) + "," +
           format_double(r.final_eps()) + "," + (r.converged ? "1" : "0") + "," + (constant ? "1" : "0") + "\n";
  }
  return out;
}

std::string stats_json(const Netlist& nl, const NetlistStats& s) {
  nlohmann::ordered_json j;
  j["gates"] = s.gate_count;
  j["inputs"] = s.input_count;
  j["outputs"] = s.output_count;
  j["flipflops"] = s.flipflop_count;
  j["nodes"] = s.node_count;
  j["degree_node"] = s.degree_node;
  j["max_depth"] = s.max_depth;
  j["warnings"] = nl.warnings();
  return j.dump(2) + "\n";
}

std::string ldf_csv(const std::string& kind, const InfluenceVector& influence) {
  std::string out;
  const auto n = influence.ldf.size();
  for (std::size_t i = 0; i < n; ++i)
    out += kind + "," + std::to_string(n) + "," + std::to_string(i) + "," + format_double(influence.raw[i]) + "," +
           format_double(influence.ldf[i]) + "\n";
  return out;
}

std::string mismatch_csv(const Netlist& nl, const MismatchReport& r) {
  std::string out = "output,mismatch_rate\n";
  for (std::size_t o = 0; o < r.per_output.size(); ++o)
    out += nl.net_name(nl.outputs()[o]) + "," + format_double(r.per_output[o]) + "\n";
  out += "*," + format_double(r.output_bit_mismatch_rate) + "\n";
  return out;
}

std::string groups_csv(const Netlist& nl, const std::vector<GroupResult>& groups) {
  std::string out = "group,first_rank,last_rank,mismatch_rate,flips_injected,flipflops\n";
  for (const auto& g : groups) {
    std::string names;
    for (auto f : g.flipflops) names += (names.empty() ? "" : " ") + nl.flipflops()[f].name;
    out += std::to_string(g.group_index) + "," + std::to_string(g.first_rank) + "," + std::to_string(g.last_rank) +
           "," + format_double(g.mismatch_rate) + "," + std::to_string(g.flips_injected) + "," + names + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "policy,coverage,flip_rate,mean_rate,stddev,area_overhead\n";
  for (const auto& r : rows)
    out += std::string(to_string(r.policy)) + "," + format_double(r.coverage) + "," + format_double(r.flip_rate) +
           "," + format_double(r.mean_rate) + "," + format_double(r.stddev) + "," + format_double(r.area_overhead) +
           "\n";
  return out;
}

std::string oracle_csv(const OracleReport& report) {
  std::string out = "oracle,status,max_deviation,tolerance,note\n";
  for (const auto& o : report.outcomes)
    out += o.name + "," + (o.skipped ? "skipped" : o.passed ? "pass" : "fail") + "," + format_double(o.max_deviation) +
           "," + format_double(o.tolerance) + "," + o.note + "\n";
  return out;
}

}  // namespace serial
