#include "serial/hardening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "serial/parallel.hpp"

namespace serial {

std::string_view to_string(HardeningPolicy policy) {
  return policy == HardeningPolicy::SerialTop ? "serial" : "random";
}

HardeningPlan select(const EndpointIndex& index, const Ranking& ranking, double coverage, HardeningPolicy policy,
                     std::uint64_t seed) {
  if (!(coverage >= 0.0 && coverage <= 1.0)) throw std::invalid_argument("coverage must be in [0, 1]");
  auto ffs = ranked_flipflops(index, ranking);
  if (ffs.size() != index.flipflops()) throw std::invalid_argument("ranking does not cover every flip-flop");
  const auto count = static_cast<std::size_t>(std::llround(coverage * static_cast<double>(ffs.size())));

  HardeningPlan plan;
  plan.coverage = coverage;
  plan.policy = policy;
  plan.seed = seed;
  if (policy == HardeningPolicy::Random) {
    std::sort(ffs.begin(), ffs.end());
    Rng rng(splitmix64(seed));
    // Partial Fisher-Yates with our own bounded draws keeps plans portable.
    for (std::size_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(ffs.size() - i));
      std::swap(ffs[i], ffs[std::min(j, ffs.size() - 1)]);
    }
  }
  plan.protected_ffs.assign(ffs.begin(), ffs.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(plan.protected_ffs.begin(), plan.protected_ffs.end());
  return plan;
}

namespace {

double run_plan(const Netlist& nl, const std::vector<std::uint32_t>& protected_ffs, double flip_rate,
                const SimConfig& sim, std::uint64_t seed) {
  std::vector<char> is_protected(nl.flipflops().size(), 0);
  for (auto f : protected_ffs) is_protected.at(f) = 1;
  FaultConfig fault;
  fault.flip_rate = flip_rate;
  fault.rng_seed = seed;
  for (std::uint32_t f = 0; f < nl.flipflops().size(); ++f)
    if (!is_protected[f]) fault.victims.push_back(f);
  SimConfig cfg = sim;
  cfg.rng_seed = seed;
  return simulate(nl, cfg, fault).report.output_bit_mismatch_rate;
}

void summarize(HardeningEvaluation& e) {
  const double n = static_cast<double>(e.seed_rates.size());
  e.mean_rate = std::accumulate(e.seed_rates.begin(), e.seed_rates.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : e.seed_rates) ss += (r - e.mean_rate) * (r - e.mean_rate);
  e.stddev = e.seed_rates.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

double area_of(const Netlist& nl, std::size_t protected_count) {
  return nl.flipflops().empty() ? 0.0
                                : static_cast<double>(protected_count) / static_cast<double>(nl.flipflops().size());
}

}  // namespace

HardeningEvaluation evaluate(const Netlist& nl, const HardeningPlan& plan, double flip_rate, const SimConfig& sim,
                             unsigned seeds, unsigned threads) {
  if (seeds == 0) throw std::invalid_argument("need at least one seed");
  HardeningEvaluation e;
  e.coverage = plan.coverage;
  e.flip_rate = flip_rate;
  e.area_overhead = area_of(nl, plan.protected_ffs.size());
  e.seed_rates.assign(seeds, 0.0);
  parallel_for(seeds, threads, [&](std::size_t s) {
    e.seed_rates[s] = run_plan(nl, plan.protected_ffs, flip_rate, sim, sim.rng_seed + s);
  });
  summarize(e);
  return e;
}

std::vector<SweepRow> sweep(const Netlist& nl, const Ranking& ranking, const std::vector<double>& coverages,
                            const std::vector<double>& flip_rates, HardeningPolicy policy, const SimConfig& sim,
                            unsigned seeds, unsigned threads) {
  if (seeds == 0) throw std::invalid_argument("need at least one seed");
  const EndpointIndex index(nl);
  const auto cells = coverages.size() * flip_rates.size();
  std::vector<HardeningEvaluation> evals(cells);
  std::vector<std::size_t> protected_count(cells, 0);
  for (std::size_t c = 0; c < cells; ++c) evals[c].seed_rates.assign(seeds, 0.0);

  parallel_for(cells * seeds, threads, [&](std::size_t job) {
    const auto cell = job / seeds;
    const auto s = job % seeds;
    const auto ci = cell / flip_rates.size();
    const auto fi = cell % flip_rates.size();
    const std::uint64_t seed = sim.rng_seed + s;
    const auto plan = select(index, ranking, coverages[ci], policy, substream_seed(seed, 1000 + ci));
    evals[cell].seed_rates[s] = run_plan(nl, plan.protected_ffs, flip_rates[fi], sim, seed);
    if (s == 0) protected_count[cell] = plan.protected_ffs.size();
  });

  std::vector<SweepRow> rows;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    auto& e = evals[cell];
    summarize(e);
    const auto ci = cell / flip_rates.size();
    const auto fi = cell % flip_rates.size();
    rows.push_back({policy, coverages[ci], flip_rates[fi], e.mean_rate, e.stddev, area_of(nl, protected_count[cell])});
  }
  return rows;
}

}  // namespace serial
