#include "serial/faultsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "serial/error.hpp"
#include "serial/parallel.hpp"

namespace serial {

InputStimulus::InputStimulus(const SimConfig& config, std::size_t inputs)
    : config_(config), rng_(substream_seed(config.rng_seed, kInputStream)), values_(inputs, 0) {
  if (config.stimulus == Stimulus::Trace) {
    if (config.trace.size() < config.cycles) throw std::invalid_argument("stimulus trace shorter than cycle count");
    for (const auto& row : config.trace)
      if (row.size() != inputs) throw std::invalid_argument("stimulus trace row width != number of inputs");
  }
}

const std::vector<std::uint8_t>& InputStimulus::next() {
  if (config_.stimulus == Stimulus::Trace) {
    const auto& row = config_.trace[cycle_++];
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = row[i] ? 1 : 0;
    return values_;
  }
  ++cycle_;
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i % 64 == 0) bits = rng_();
    values_[i] = static_cast<std::uint8_t>((bits >> (i % 64)) & 1u);
  }
  return values_;
}

std::vector<std::uint8_t> initial_state(const SimConfig& config, std::size_t flipflops) {
  std::vector<std::uint8_t> state(flipflops, 0);
  if (config.initial_state == InitialState::Random) {
    Rng rng(substream_seed(config.rng_seed, kInitialStateStream));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < flipflops; ++i) {
      if (i % 64 == 0) bits = rng();
      state[i] = static_cast<std::uint8_t>((bits >> (i % 64)) & 1u);
    }
  }
  return state;
}

namespace {

// Level-ordered gate list with flattened fan-in.
class CompiledLogic {
 public:
  explicit CompiledLogic(const Netlist& nl) {
    for (auto g : nl.topological_order()) {
      const auto& gate = nl.gates()[g];
      ops_.push_back({gate.kind, gate.output, static_cast<std::uint32_t>(pins_.size()),
                      static_cast<std::uint32_t>(gate.inputs.size()), gate.table.get()});
      pins_.insert(pins_.end(), gate.inputs.begin(), gate.inputs.end());
    }
  }

  void evaluate(std::vector<std::uint8_t>& values) const {
    std::uint8_t buf[32];
    for (const auto& op : ops_) {
      if (op.kind == GateKind::Custom) {
        std::uint32_t row = 0;
        for (std::uint32_t i = 0; i < op.fanin; ++i) row = (row << 1) | values[pins_[op.first + i]];
        values[op.output] = (*op.table)[row];
      } else {
        for (std::uint32_t i = 0; i < op.fanin; ++i) buf[i] = values[pins_[op.first + i]];
        values[op.output] = serial::evaluate(op.kind, buf, op.fanin);
      }
    }
  }

 private:
  struct Op {
    GateKind kind;
    NetId output;
    std::uint32_t first;
    std::uint32_t fanin;
    const TruthTable* table;
  };
  std::vector<Op> ops_;
  std::vector<NetId> pins_;
};

}  // namespace

SimResult simulate(const Netlist& nl, const SimConfig& sim, const FaultConfig& fault, bool record_traces) {
  if (!(fault.flip_rate >= 0.0 && fault.flip_rate <= 1.0)) throw std::invalid_argument("flip_rate must be in [0, 1]");
  const auto n_ff = nl.flipflops().size();
  for (auto v : fault.victims)
    if (v >= n_ff) throw std::invalid_argument("victim flip-flop index out of range");
  for (const auto& f : fault.forced)
    if (f.flipflop >= n_ff) throw std::invalid_argument("forced flip refers to an unknown flip-flop");

  const CompiledLogic logic(nl);
  InputStimulus stimulus(sim, nl.inputs().size());
  FlipSchedule schedule(fault.victims, fault.flip_rate, fault.rng_seed);
  auto forced = fault.forced;
  std::sort(forced.begin(), forced.end(), [](const auto& a, const auto& b) { return a.cycle < b.cycle; });
  std::size_t next_forced = 0;

  std::vector<std::uint8_t> golden(nl.net_count(), 0), faulty(nl.net_count(), 0);
  std::vector<std::uint8_t> q_golden = initial_state(sim, n_ff);
  std::vector<std::uint8_t> q_faulty = q_golden;
  const auto n_out = nl.outputs().size();
  std::vector<std::uint64_t> per_output(n_out, 0);

  SimResult result;
  auto& rep = result.report;
  bool diverged = false;
  for (std::uint64_t c = 0; c < sim.cycles; ++c) {
    const auto& in = stimulus.next();
    for (std::size_t i = 0; i < in.size(); ++i) golden[nl.inputs()[i]] = in[i];

    auto flip = [&](std::uint32_t ff) {
      q_faulty[ff] ^= 1u;
      ++rep.flips_injected;
      diverged = true;
    };
    schedule.flips_at(c, flip);
    for (; next_forced < forced.size() && forced[next_forced].cycle == c; ++next_forced) flip(forced[next_forced].flipflop);

    for (std::size_t f = 0; f < n_ff; ++f) golden[nl.flipflops()[f].q] = q_golden[f];
    logic.evaluate(golden);
    if (diverged) {
      for (std::size_t i = 0; i < in.size(); ++i) faulty[nl.inputs()[i]] = in[i];
      for (std::size_t f = 0; f < n_ff; ++f) faulty[nl.flipflops()[f].q] = q_faulty[f];
      logic.evaluate(faulty);
    }
    const auto& faulty_view = diverged ? faulty : golden;

    for (std::size_t o = 0; o < n_out; ++o) {
      const NetId net = nl.outputs()[o];
      if (golden[net] != faulty_view[net]) ++per_output[o];
    }
    if (record_traces) {
      auto& g = result.golden_outputs.emplace_back(n_out);
      auto& f = result.faulty_outputs.emplace_back(n_out);
      for (std::size_t o = 0; o < n_out; ++o) {
        g[o] = golden[nl.outputs()[o]];
        f[o] = faulty_view[nl.outputs()[o]];
      }
    }

    for (std::size_t f = 0; f < n_ff; ++f) {
      q_golden[f] = golden[nl.flipflops()[f].d];
      q_faulty[f] = faulty_view[nl.flipflops()[f].d];
    }
    if (diverged) diverged = q_golden != q_faulty;
  }

  rep.per_output.resize(n_out);
  const double cycles = static_cast<double>(std::max<std::uint64_t>(sim.cycles, 1));
  for (std::size_t o = 0; o < n_out; ++o) {
    rep.mismatched_bits += per_output[o];
    rep.per_output[o] = static_cast<double>(per_output[o]) / cycles;
  }
  rep.output_bit_mismatch_rate =
      n_out && sim.cycles ? static_cast<double>(rep.mismatched_bits) / (cycles * static_cast<double>(n_out)) : 0.0;
  return result;
}

std::vector<std::uint32_t> ranked_flipflops(const EndpointIndex& index, const Ranking& ranking) {
  std::vector<std::uint32_t> ffs;
  for (const auto& e : ranking)
    if (e.kind == NodeKind::FlipFlop) ffs.push_back(index.netlist_index(e.node));
  return ffs;
}

std::vector<GroupResult> group_experiment(const Netlist& nl, const Ranking& ranking, std::size_t group_size,
                                          double flip_rate, const SimConfig& sim, unsigned seeds, unsigned threads) {
  if (group_size == 0) throw std::invalid_argument("group_size must be >= 1");
  if (seeds == 0) throw std::invalid_argument("need at least one seed");
  const EndpointIndex index(nl);
  const auto ffs = ranked_flipflops(index, ranking);
  if (ffs.size() != nl.flipflops().size()) throw std::invalid_argument("ranking does not cover every flip-flop");

  std::vector<GroupResult> groups;
  for (std::size_t first = 0; first < ffs.size(); first += group_size) {
    GroupResult g;
    g.group_index = groups.size();
    g.first_rank = first + 1;
    g.last_rank = std::min(first + group_size, ffs.size());
    g.flipflops.assign(ffs.begin() + static_cast<std::ptrdiff_t>(first),
                       ffs.begin() + static_cast<std::ptrdiff_t>(g.last_rank));
    g.seed_rates.assign(seeds, 0.0);
    groups.push_back(std::move(g));
  }

  std::vector<std::uint64_t> flips(groups.size() * seeds, 0);
  parallel_for(groups.size() * seeds, threads, [&](std::size_t job) {
    const auto gi = job / seeds;
    const auto s = job % seeds;
    SimConfig cfg = sim;
    cfg.rng_seed = sim.rng_seed + s;
    FaultConfig fault{groups[gi].flipflops, flip_rate, cfg.rng_seed, {}};
    const auto r = simulate(nl, cfg, fault);
    groups[gi].seed_rates[s] = r.report.output_bit_mismatch_rate;
    flips[job] = r.report.flips_injected;
  });
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    auto& g = groups[gi];
    g.mismatch_rate = std::accumulate(g.seed_rates.begin(), g.seed_rates.end(), 0.0) / seeds;
    for (unsigned s = 0; s < seeds; ++s) g.flips_injected += flips[gi * seeds + s];
  }
  return groups;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double rank_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DegenerateInput("rank_correlation: sequences differ in length");
  if (x.size() < 3) throw DegenerateInput("rank_correlation: need at least 3 points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("rank_correlation: constant sequence");
  return sxy / std::sqrt(sxx * syy);
}

double significance_coherence(const std::vector<GroupResult>& groups) {
  std::vector<double> order, rates;
  for (const auto& g : groups) {
    order.push_back(static_cast<double>(groups.size() - g.group_index));
    rates.push_back(g.mismatch_rate);
  }
  return rank_correlation(order, rates);
}

}  // namespace serial
