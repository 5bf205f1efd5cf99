#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SparseLU>

#include "serial/propagation.hpp"

namespace serial {

namespace {

constexpr double kClosedTolerance = 1e-12;

// A strongly connected set of flip-flops that passes all of its significance
// around the loop (no leak to inputs or other components) has spectral
// radius 1: the fixed point does not exist.
bool has_closed_loop(const SignificanceGraph& graph) {
  const auto& index = graph.index();
  const auto k = static_cast<std::uint32_t>(index.outputs());
  const auto n = static_cast<std::uint32_t>(index.flipflops());
  const auto& arrows = graph.arrows();

  // Iterative Tarjan over the flip-flop subgraph.
  constexpr std::uint32_t kUnset = ~0u;
  std::vector<std::uint32_t> order(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::uint32_t counter = 0, components = 0;
  struct Frame {
    std::uint32_t v;
    std::uint32_t next;
  };
  std::vector<Frame> frames;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (order[root] != kUnset) continue;
    frames.push_back({root, graph.out_range(k + root).first});
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& f = frames.back();
      const auto end = graph.out_range(k + f.v).second;
      if (f.next < end) {
        const auto& a = arrows[f.next++];
        if (index.kind(a.tail) != NodeKind::FlipFlop || a.df * a.confidence == 0.0) continue;
        const auto w = a.tail - k;
        if (order[w] == kUnset) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, graph.out_range(k + w).first});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], order[w]);
        }
        continue;
      }
      const auto v = f.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      if (low[v] == order[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = components;
        } while (w != v);
        ++components;
      }
    }
  }

  std::vector<char> leaks(components, 0);
  std::vector<char> has_internal(components, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    double internal = 0.0;
    const auto [begin, end] = graph.out_range(k + v);
    for (auto a = begin; a < end; ++a) {
      const auto& arrow = arrows[a];
      if (index.kind(arrow.tail) == NodeKind::FlipFlop && comp[arrow.tail - k] == comp[v]) {
        internal += arrow.df * arrow.confidence;
        has_internal[comp[v]] = 1;
      }
    }
    if (internal < 1.0 - kClosedTolerance) leaks[comp[v]] = 1;
  }
  for (std::uint32_t c = 0; c < components; ++c)
    if (has_internal[c] && !leaks[c]) return true;
  return false;
}

}  // namespace

SignificanceVector direct_solve(const SignificanceGraph& graph, const Eigen::VectorXd& s_out_init) {
  const auto& index = graph.index();
  const auto k = static_cast<Eigen::Index>(index.outputs());
  const auto n = static_cast<Eigen::Index>(index.flipflops());
  const auto m = static_cast<Eigen::Index>(index.inputs());
  if (s_out_init.size() != k) throw std::invalid_argument("direct_solve: s_out_init needs one value per output");
  if (has_closed_loop(graph)) throw SingularSystem("a flip-flop loop retains all of its significance");

  const Eigen::SparseMatrix<double> w = graph.weighted_df();
  const Eigen::SparseMatrix<double> ff_block = w.block(0, k, n, n);
  const Eigen::SparseMatrix<double> out_block = w.block(0, 0, n, k);

  SignificanceVector s;
  s.k = static_cast<std::size_t>(k);
  s.n = static_cast<std::size_t>(n);
  s.m = static_cast<std::size_t>(m);
  s.values = Eigen::VectorXd::Zero(k + n + m);
  s.values.head(k) = s_out_init;

  if (n > 0) {
    Eigen::SparseMatrix<double> system(n, n);
    system.setIdentity();
    system -= ff_block;
    system.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) throw SingularSystem("flip-flop block (I - DF_FF) is singular");
    const Eigen::VectorXd rhs = out_block * s_out_init;
    Eigen::VectorXd s_ff = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !s_ff.allFinite())
      throw SingularSystem("flip-flop block (I - DF_FF) could not be solved");
    s.values.segment(k, n) = s_ff;
  }
  if (m > 0) {
    const Eigen::SparseMatrix<double> in_block = w.block(n, 0, m, k + n);
    s.values.tail(m) = in_block * s.values.head(k + n);
  }
  return s;
}

}  // namespace serial
