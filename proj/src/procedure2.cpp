#include <algorithm>

#include "serial/propagation.hpp"

#include "mismatch.hpp"

namespace serial {

Procedure2Result procedure2(const SignificanceGraph& graph, const Eigen::VectorXd& s_out_init,
                            const PropagationOptions& options, const IterationObserver& observer) {
  const auto& index = graph.index();
  const auto k = index.outputs();
  if (static_cast<std::size_t>(s_out_init.size()) != k)
    throw std::invalid_argument("procedure2: s_out_init needs one value per output");
  if ((s_out_init.array() < 0.0).any()) throw std::invalid_argument("procedure2: output significance must be >= 0");

  Procedure2Result out;
  out.s.k = k;
  out.s.n = index.flipflops();
  out.s.m = index.inputs();
  Eigen::VectorXd& s = out.s.values;
  s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
  s.head(static_cast<Eigen::Index>(k)) = s_out_init;

  const auto& arrows = graph.arrows();
  std::vector<double> dw(arrows.size(), 0.0);
  std::vector<int> visited(index.size(), 0);
  std::vector<std::uint32_t> wave, next;
  auto& rep = out.report;
  for (int iter = 1; iter <= options.max_iters; ++iter) {
    wave.resize(k);
    for (std::uint32_t o = 0; o < k; ++o) {
      wave[o] = o;
      visited[o] = iter;
    }
    while (!wave.empty()) {
      next.clear();
      for (auto v : wave) {
        const auto [begin, end] = graph.out_range(v);
        for (auto a = begin; a < end; ++a) {
          const auto& arrow = arrows[a];
          const double updated = s[v] * arrow.df;
          const double delta = updated - dw[a];
          dw[a] = updated;
          s[arrow.tail] += arrow.confidence * delta;
          if (index.kind(arrow.tail) == NodeKind::FlipFlop && visited[arrow.tail] != iter) {
            visited[arrow.tail] = iter;
            next.push_back(arrow.tail);
          }
        }
      }
      std::sort(next.begin(), next.end());
      wave.swap(next);
    }
    rep.iterations = iter;
    rep.eps_trace.push_back(detail::arrow_mismatch(
        arrows, dw, [&](std::uint32_t h) { return s[h]; }, [](const SignificanceArrow& a) { return a.df; }));
    if (observer) observer(iter, s);
    if (rep.eps_trace.back() <= options.eps_threshold) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && options.throw_on_nonconvergence)
    throw NonConvergence("significance did not converge within " + std::to_string(options.max_iters) +
                             " iterations (eps " + std::to_string(rep.final_eps()) + ")",
                         rep);
  return out;
}

double residual(const SignificanceGraph& graph, const SignificanceVector& s) {
  const auto k = static_cast<Eigen::Index>(s.k);
  const auto n = static_cast<Eigen::Index>(s.n);
  const Eigen::VectorXd heads = s.values.head(k + n);
  const Eigen::VectorXd tails = s.values.tail(n + static_cast<Eigen::Index>(s.m));
  const Eigen::VectorXd r = tails - graph.weighted_df() * heads;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace serial
