#include <algorithm>

#include "serial/parallel.hpp"
#include "serial/propagation.hpp"

#include "mismatch.hpp"

namespace serial {

Procedure1Result procedure1(const LogicGraph& graph, const PropagationOptions& options) {
  const auto nodes = graph.node_count();
  Procedure1Result out;
  out.ls.assign(nodes, 0.0);
  out.ldw.assign(graph.arrows.size(), 0.0);
  out.ls[0] = 1.0;

  std::vector<int> visited(nodes, 0);
  std::vector<std::uint32_t> wave, next;
  auto& rep = out.report;
  for (int iter = 1; iter <= options.max_iters; ++iter) {
    wave.assign(1, 0);
    visited[0] = iter;
    while (!wave.empty()) {
      next.clear();
      for (auto v : wave) {
        for (auto a = graph.first_arrow[v]; a < graph.first_arrow[v + 1]; ++a) {
          const auto& arrow = graph.arrows[a];
          const double updated = out.ls[v] * arrow.ldf;
          const double delta = updated - out.ldw[a];
          out.ldw[a] = updated;
          out.ls[arrow.tail] += delta;
          if (graph.is_gate(arrow.tail) && visited[arrow.tail] != iter) {
            visited[arrow.tail] = iter;
            next.push_back(arrow.tail);
          }
        }
      }
      // Local gate ids follow name order.
      std::sort(next.begin(), next.end());
      wave.swap(next);
    }
    rep.iterations = iter;
    rep.eps_trace.push_back(detail::arrow_mismatch(
        graph.arrows, out.ldw, [&](std::uint32_t h) { return out.ls[h]; },
        [](const LogicGraph::Arrow& a) { return a.ldf; }));
    if (rep.eps_trace.back() <= options.eps_threshold) {
      rep.converged = true;
      break;
    }
  }

  const auto sink_base = static_cast<std::uint32_t>(1 + graph.gates.size());
  out.df.reserve(graph.sinks.size());
  for (std::uint32_t i = 0; i < graph.sinks.size(); ++i)
    if (out.ls[sink_base + i] != 0.0) out.df.emplace_back(graph.sinks[i], out.ls[sink_base + i]);

  if (!rep.converged && options.throw_on_nonconvergence)
    throw NonConvergence("distribution factors did not converge within " + std::to_string(options.max_iters) +
                             " iterations",
                         rep);
  return out;
}

DFComputation procedure1_all(const Netlist& netlist, const PropagationOptions& options, unsigned threads) {
  const EndpointIndex index(netlist);
  const auto gate_ldf = gate_ldf_table(netlist);
  const auto heads = index.outputs() + index.flipflops();

  std::vector<Procedure1Result> rows(heads);
  std::vector<char> constant(heads, 0);
  PropagationOptions local = options;
  local.throw_on_nonconvergence = false;
  parallel_for(heads, threads, [&](std::size_t h) {
    try {
      rows[h] = procedure1(build_logic_graph(netlist, index, gate_ldf, static_cast<std::uint32_t>(h)), local);
    } catch (const EmptyConeError&) {
      constant[h] = 1;
      rows[h].report.converged = true;
    }
  });

  DFComputation result;
  result.df.outputs = index.outputs();
  result.df.flipflops = index.flipflops();
  result.df.inputs = index.inputs();
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<std::string> failed;
  double iteration_sum = 0.0;
  const auto k = static_cast<std::uint32_t>(index.outputs());
  for (std::uint32_t h = 0; h < heads; ++h) {
    for (const auto& [tail, value] : rows[h].df)
      triplets.emplace_back(static_cast<int>(tail - k), static_cast<int>(h), value);
    if (constant[h]) result.constant_cones.push_back(h);
    if (!rows[h].report.converged) failed.push_back(index.name(h));
    iteration_sum += rows[h].report.iterations;
    rows[h].ls.clear();
    rows[h].ldw.clear();
    result.reports.push_back(std::move(rows[h].report));
  }
  result.mean_iterations = heads ? iteration_sum / static_cast<double>(heads) : 0.0;
  result.df.df.resize(static_cast<Eigen::Index>(index.flipflops() + index.inputs()), static_cast<Eigen::Index>(heads));
  result.df.df.setFromTriplets(triplets.begin(), triplets.end());

  if (!failed.empty() && options.throw_on_nonconvergence) {
    std::string msg = "distribution factors did not converge for " + std::to_string(failed.size()) + " endpoint(s):";
    for (std::size_t i = 0; i < failed.size() && i < 8; ++i) msg += " " + failed[i];
    ConvergenceReport worst;
    for (const auto& r : result.reports)
      if (!r.converged && (worst.eps_trace.empty() || r.final_eps() > worst.final_eps())) worst = r;
    throw NonConvergence(msg, worst);
  }
  return result;
}

}  // namespace serial
