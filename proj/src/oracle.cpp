#include "serial/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "serial/influence.hpp"

namespace serial {

namespace {

std::vector<double> enumerated_ldf(const Gate& gate) {
  const int n = static_cast<int>(gate.inputs.size());
  if (gate.kind == GateKind::Custom) return influence(*gate.table).ldf;
  return influence(TruthTable::of(gate.kind, n)).ldf;
}

}  // namespace

std::size_t cone_gate_count(const Netlist& nl, const EndpointIndex& index, std::uint32_t endpoint) {
  std::unordered_set<std::uint32_t> seen;
  std::vector<NetId> stack{data_net(nl, index, endpoint)};
  while (!stack.empty()) {
    const NetId net = stack.back();
    stack.pop_back();
    const auto& d = nl.driver(net);
    if (d.kind != DriverKind::Gate || !seen.insert(d.index).second) continue;
    for (auto in : nl.gates()[d.index].inputs) stack.push_back(in);
  }
  return seen.size();
}

std::vector<std::pair<std::uint32_t, double>> path_enumeration_df(const Netlist& nl, const EndpointIndex& index,
                                                                 std::uint32_t endpoint, std::size_t gate_limit) {
  const auto gates = cone_gate_count(nl, index, endpoint);
  if (gates > gate_limit) throw OracleSkipped(gates, gate_limit);

  std::map<std::uint32_t, std::vector<double>> ldf;
  std::map<std::uint32_t, double> total;
  // Each stack entry is one partial path: (net reached, product so far).
  std::vector<std::pair<NetId, double>> stack{{data_net(nl, index, endpoint), 1.0}};
  while (!stack.empty()) {
    const auto [net, weight] = stack.back();
    stack.pop_back();
    const auto& d = nl.driver(net);
    if (d.kind == DriverKind::Input) {
      total[index.input_node(d.index)] += weight;
    } else if (d.kind == DriverKind::FlipFlop) {
      total[index.flipflop_node(d.index)] += weight;
    } else {
      const auto& gate = nl.gates()[d.index];
      auto it = ldf.find(d.index);
      if (it == ldf.end()) it = ldf.emplace(d.index, enumerated_ldf(gate)).first;
      for (std::size_t pin = 0; pin < gate.inputs.size(); ++pin)
        if (it->second[pin] > 0.0) stack.emplace_back(gate.inputs[pin], weight * it->second[pin]);
    }
  }
  std::vector<std::pair<std::uint32_t, double>> row;
  for (const auto& [tail, value] : total)
    if (value > 0.0) row.emplace_back(tail, value);
  return row;
}

namespace {

bool reference_gate(const Gate& gate, const std::vector<std::uint8_t>& pins) {
  const auto n = pins.size();
  if (gate.kind == GateKind::Custom) {
    std::size_t row = 0;
    for (auto p : pins) row = row * 2 + p;
    return (*gate.table)[row];
  }
  const auto ones = static_cast<std::size_t>(std::count(pins.begin(), pins.end(), 1));
  switch (gate.kind) {
    case GateKind::And: return ones == n;
    case GateKind::Nand: return ones != n;
    case GateKind::Or: return ones > 0;
    case GateKind::Nor: return ones == 0;
    case GateKind::Xor: return ones % 2 == 1;
    case GateKind::Xnor: return ones % 2 == 0;
    case GateKind::Not: return pins[0] == 0;
    case GateKind::Buf: return pins[0] == 1;
    case GateKind::Mux: return pins[pins[0] ? 2 : 1] == 1;
    case GateKind::Custom: break;
  }
  return false;
}

// On-demand evaluation of one net, memoized per cycle. -1 marks unknown.
std::uint8_t demand(const Netlist& nl, NetId root, std::vector<std::int8_t>& memo) {
  std::vector<NetId> stack{root};
  std::vector<std::uint8_t> pins;
  while (!stack.empty()) {
    const NetId net = stack.back();
    if (memo[net] >= 0) {
      stack.pop_back();
      continue;
    }
    const auto& gate = nl.gates()[nl.driver(net).index];
    bool ready = true;
    for (auto in : gate.inputs)
      if (memo[in] < 0) {
        stack.push_back(in);
        ready = false;
      }
    if (!ready) continue;
    pins.clear();
    for (auto in : gate.inputs) pins.push_back(static_cast<std::uint8_t>(memo[in]));
    memo[net] = reference_gate(gate, pins) ? 1 : 0;
    stack.pop_back();
  }
  return static_cast<std::uint8_t>(memo[root]);
}

}  // namespace

MismatchReport reference_simulate(const Netlist& nl, const SimConfig& sim, const FaultConfig& fault) {
  const auto n_ff = nl.flipflops().size();
  const auto n_out = nl.outputs().size();
  InputStimulus stimulus(sim, nl.inputs().size());
  FlipSchedule schedule(fault.victims, fault.flip_rate, fault.rng_seed);
  std::vector<std::uint8_t> good = initial_state(sim, n_ff);
  std::vector<std::uint8_t> bad = good;
  std::vector<std::uint64_t> wrong(n_out, 0);
  MismatchReport rep;

  std::vector<std::int8_t> memo_good(nl.net_count()), memo_bad(nl.net_count());
  for (std::uint64_t c = 0; c < sim.cycles; ++c) {
    const auto& in = stimulus.next();
    schedule.flips_at(c, [&](std::uint32_t ff) {
      bad[ff] ^= 1u;
      ++rep.flips_injected;
    });
    for (const auto& f : fault.forced)
      if (f.cycle == c) {
        bad[f.flipflop] ^= 1u;
        ++rep.flips_injected;
      }

    auto reset = [&](std::vector<std::int8_t>& memo, const std::vector<std::uint8_t>& q) {
      std::fill(memo.begin(), memo.end(), -1);
      for (std::size_t i = 0; i < in.size(); ++i) memo[nl.inputs()[i]] = static_cast<std::int8_t>(in[i]);
      for (std::size_t f = 0; f < n_ff; ++f) memo[nl.flipflops()[f].q] = static_cast<std::int8_t>(q[f]);
    };
    reset(memo_good, good);
    reset(memo_bad, bad);
    for (std::size_t o = 0; o < n_out; ++o)
      if (demand(nl, nl.outputs()[o], memo_good) != demand(nl, nl.outputs()[o], memo_bad)) ++wrong[o];
    for (std::size_t f = 0; f < n_ff; ++f) {
      good[f] = demand(nl, nl.flipflops()[f].d, memo_good);
      bad[f] = demand(nl, nl.flipflops()[f].d, memo_bad);
    }
  }

  const double cycles = static_cast<double>(std::max<std::uint64_t>(sim.cycles, 1));
  for (std::size_t o = 0; o < n_out; ++o) {
    rep.mismatched_bits += wrong[o];
    rep.per_output.push_back(static_cast<double>(wrong[o]) / cycles);
  }
  rep.output_bit_mismatch_rate =
      n_out && sim.cycles ? static_cast<double>(rep.mismatched_bits) / (cycles * static_cast<double>(n_out)) : 0.0;
  return rep;
}

double relative_deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_deviation: size mismatch");
  if (a.size() == 0) return 0.0;
  const double diff = (a - b).cwiseAbs().maxCoeff();
  const double scale = b.cwiseAbs().maxCoeff();
  if (scale == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / scale;
}

bool OracleReport::all_passed() const {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.skipped || o.passed; });
}

OracleReport oracle_check(const Netlist& nl, const OracleLimits& limits, unsigned threads) {
  const EndpointIndex index(nl);
  const auto linear_nodes = index.flipflops() + index.inputs();
  if (linear_nodes > limits.max_linear_nodes) throw OracleSkipped(linear_nodes, limits.max_linear_nodes);
  OracleReport report;

  PropagationOptions p1;
  p1.eps_threshold = 0.0;
  p1.max_iters = 100000;
  const auto dfc = procedure1_all(nl, p1, threads);

  {
    OracleOutcome o{"procedure1_vs_path_enumeration", false, true, 0.0, 1e-9, ""};
    std::size_t checked = 0;
    for (std::uint32_t head = 0; head < index.outputs() + index.flipflops(); ++head) {
      if (cone_gate_count(nl, index, head) > limits.max_cone_gates) continue;
      ++checked;
      const auto row = path_enumeration_df(nl, index, head, limits.max_cone_gates);
      Eigen::VectorXd expected = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(linear_nodes));
      for (const auto& [tail, v] : row) expected[tail - index.outputs()] = v;
      Eigen::VectorXd got = dfc.df.df.col(head);
      o.max_deviation = std::max(o.max_deviation, (got - expected).cwiseAbs().maxCoeff());
    }
    o.skipped = checked == 0;
    o.passed = !o.skipped && o.max_deviation <= o.tolerance;
    o.note = std::to_string(checked) + " of " + std::to_string(index.outputs() + index.flipflops()) +
             " cones within " + std::to_string(limits.max_cone_gates) + " gates";
    report.outcomes.push_back(o);
  }

  {
    OracleOutcome o{"procedure2_vs_direct_solve", false, false, 0.0, 1e-6, ""};
    const auto graph = build_significance_graph(nl, dfc.df);
    const Eigen::VectorXd s_out = output_weights(index, WeightMode::Uniform);
    try {
      const auto exact = direct_solve(graph, s_out);
      PropagationOptions p2;
      p2.eps_threshold = limits.p2_eps;
      p2.max_iters = limits.p2_max_iters;
      p2.throw_on_nonconvergence = false;
      const auto iter = procedure2(graph, s_out, p2);
      o.max_deviation = relative_deviation(iter.s.values, exact.values);
      o.passed = o.max_deviation <= o.tolerance;
      o.note = std::to_string(iter.report.iterations) + " iterations";
    } catch (const SingularSystem& e) {
      o.note = e.what();
    }
    report.outcomes.push_back(o);
  }

  {
    OracleOutcome o{"simulate_vs_reference", false, false, 0.0, 0.0, ""};
    if (nl.gates().size() > limits.max_sim_gates) {
      o.skipped = true;
      o.note = "more than " + std::to_string(limits.max_sim_gates) + " gates";
    } else {
      SimConfig sim;
      sim.cycles = limits.sim_cycles;
      sim.initial_state = InitialState::Random;
      FaultConfig fault;
      fault.flip_rate = limits.sim_flip_rate;
      for (std::uint32_t f = 0; f < nl.flipflops().size(); ++f) fault.victims.push_back(f);
      const auto a = simulate(nl, sim, fault).report;
      const auto b = reference_simulate(nl, sim, fault);
      o.max_deviation = std::abs(a.output_bit_mismatch_rate - b.output_bit_mismatch_rate);
      for (std::size_t i = 0; i < a.per_output.size(); ++i)
        o.max_deviation = std::max(o.max_deviation, std::abs(a.per_output[i] - b.per_output[i]));
      o.passed = o.max_deviation == 0.0 && a.flips_injected == b.flips_injected;
      o.note = std::to_string(a.flips_injected) + " flips; " + std::to_string(a.mismatched_bits) + " mismatched bits";
    }
    report.outcomes.push_back(o);
  }
  return report;
}

}  // namespace serial
