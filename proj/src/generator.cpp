#include "serial/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "serial/error.hpp"
#include "serial/rng.hpp"

namespace serial {

namespace {

constexpr GateKind kMixKinds[] = {GateKind::And, GateKind::Nand, GateKind::Or,  GateKind::Nor,
                                  GateKind::Xor, GateKind::Xnor, GateKind::Mux, GateKind::Not};

class Generator {
 public:
  explicit Generator(const GeneratorSpec& spec) : spec_(spec), rng_(splitmix64(spec.seed)) {}

  Netlist run() {
    const auto& s = spec_;
    if (s.gates < s.outputs) throw InfeasibleSpec("need at least one gate per output");
    if (s.inputs == 0 && s.flipflops == 0 && s.outputs > 0)
      throw InfeasibleSpec("outputs need at least one input or flip-flop to depend on");
    if (s.max_fanin < 2) throw InfeasibleSpec("max_fanin must be >= 2");
    if (s.degree < 1.0) throw InfeasibleSpec("degree must be >= 1");

    for (std::size_t i = 0; i < s.inputs; ++i) {
      builder_.add_input("in" + std::to_string(i));
      leaves_.push_back("in" + std::to_string(i));
    }
    for (std::size_t i = 0; i < s.flipflops; ++i) leaves_.push_back("ff" + std::to_string(i));
    for (std::size_t i = 0; i < s.outputs; ++i) builder_.add_output("out" + std::to_string(i));

    // Gate budget: outputs first take one gate each, the rest is spread evenly.
    const std::size_t cones = s.outputs + s.flipflops;
    std::vector<std::size_t> budget(cones, 0);
    std::size_t spare = s.gates;
    for (std::size_t c = 0; c < s.outputs; ++c) budget[c] = 1, --spare;
    for (std::size_t c = 0; c < cones && spare; ++c) {
      const std::size_t share = spare / (cones - c) + ((spare % (cones - c)) ? 1 : 0);
      budget[c] += share;
      spare -= share;
    }

    // Flip-flop cones before output cones so outputs can reuse their logic.
    for (std::size_t f = 0; f < s.flipflops; ++f) {
      auto root = build_cone(budget[s.outputs + f], "", static_cast<long>(f));
      builder_.add_dff("ff" + std::to_string(f), root);
    }
    for (std::size_t o = 0; o < s.outputs; ++o) build_cone(budget[o], "out" + std::to_string(o), -1);
    return std::move(builder_).build();
  }

 private:
  double uniform() { return uniform01(rng_); }
  std::size_t below(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))); }

  // Leaf ids: [0, inputs) inputs, then flip-flops.
  bool allowed_leaf(std::size_t leaf, long ff) const {
    if (leaf < spec_.inputs || spec_.loops || ff < 0) return true;
    return static_cast<long>(leaf - spec_.inputs) < ff;
  }

  std::vector<std::uint32_t> pick_leaves(long ff, std::vector<std::uint32_t> chosen, std::size_t target) {
    auto add = [&](std::size_t leaf) {
      if (std::find(chosen.begin(), chosen.end(), leaf) == chosen.end()) chosen.push_back(static_cast<std::uint32_t>(leaf));
    };
    const auto& s = spec_;
    if (ff >= 0 && s.inputs > 0) {
      bool has_input = std::any_of(chosen.begin(), chosen.end(), [&](auto l) { return l < s.inputs; });
      if (!has_input) add(below(s.inputs));
    }
    if (ff >= 0 && s.loops && s.flipflops >= 2 && ff < 2) add(s.inputs + static_cast<std::size_t>(1 - ff));

    std::size_t pool = 0;
    for (std::size_t l = 0; l < leaves_.size(); ++l) pool += allowed_leaf(l, ff);
    target = std::min(target, pool);
    for (int guard = 0; chosen.size() < target && guard < 1000; ++guard) {
      const auto leaf = below(leaves_.size());
      if (allowed_leaf(leaf, ff)) add(leaf);
    }
    if (chosen.empty()) {
      if (pool == 0) throw InfeasibleSpec("no legal leaf for flip-flop cone without loops");
      for (std::size_t l = 0; l < leaves_.size(); ++l)
        if (allowed_leaf(l, ff)) {
          add(l);
          break;
        }
    }
    return chosen;
  }

  GateKind pick_kind(std::size_t fanin) {
    if (fanin == 1) return uniform() < 0.8 ? GateKind::Not : GateKind::Buf;
    double total = 0.0;
    for (int i = 0; i < 8; ++i) {
      const auto k = kMixKinds[i];
      if (k == GateKind::Not || (k == GateKind::Mux && fanin != 3)) continue;
      total += spec_.kind_mix[static_cast<std::size_t>(i)];
    }
    double r = uniform() * total;
    for (int i = 0; i < 8; ++i) {
      const auto k = kMixKinds[i];
      if (k == GateKind::Not || (k == GateKind::Mux && fanin != 3)) continue;
      r -= spec_.kind_mix[static_cast<std::size_t>(i)];
      if (r < 0.0) return k;
    }
    return GateKind::And;
  }

  // Returns the net that feeds the endpoint. `ff` is the flip-flop index or -1.
  std::string build_cone(std::size_t gates, const std::string& root_name, long ff) {
    const auto& s = spec_;
    const double jitter = 0.6 + 0.8 * uniform();
    auto target = static_cast<std::size_t>(std::max(1.0, std::round(s.degree * jitter)));
    target = std::min<std::size_t>(target, 1 + gates * static_cast<std::size_t>(s.max_fanin - 1));

    struct Signal {
      std::string net;
      std::vector<std::uint32_t> leaves;
    };
    std::vector<Signal> signals;
    std::vector<std::uint32_t> seed_leaves;
    if (gates >= 2 && !made_.empty() && uniform() < s.reuse_probability) {
      const auto& reused = made_[below(made_.size())];
      if (reused.leaves.size() < target && std::all_of(reused.leaves.begin(), reused.leaves.end(),
                                                      [&](auto l) { return allowed_leaf(l, ff); })) {
        signals.push_back({reused.net, reused.leaves});
        seed_leaves = reused.leaves;
      }
    }
    const auto leaves = pick_leaves(ff, seed_leaves, target);
    for (auto l : leaves)
      if (std::find(seed_leaves.begin(), seed_leaves.end(), l) == seed_leaves.end())
        signals.push_back({leaves_[l], {l}});

    if (gates == 0) return signals.front().net;

    for (std::size_t j = 0; j < gates; ++j) {
      const std::size_t remaining = gates - j;
      const std::size_t count = signals.size();
      std::size_t fanin = 1;
      if (remaining == 1) {
        fanin = count;
      } else if (count > 1) {
        const std::size_t need = (count - 1 + remaining - 1) / remaining + 1;
        fanin = std::clamp<std::size_t>(need, 2, static_cast<std::size_t>(s.max_fanin));
        if (uniform() < 0.3) fanin = std::min<std::size_t>(count, std::max(fanin, std::size_t{2} + below(2)));
        fanin = std::min(fanin, count);
      }
      const auto kind = pick_kind(fanin);
      std::vector<std::string> args;
      std::vector<std::uint32_t> merged;
      for (std::size_t p = 0; p < fanin; ++p) {
        const auto pick = below(signals.size());
        args.push_back(signals[pick].net);
        merged.insert(merged.end(), signals[pick].leaves.begin(), signals[pick].leaves.end());
        signals[pick] = std::move(signals.back());
        signals.pop_back();
      }
      std::sort(merged.begin(), merged.end());
      merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
      const auto name = (remaining == 1 && !root_name.empty()) ? root_name : "g" + std::to_string(gate_counter_++);
      if (fanin > 30) throw InfeasibleSpec("cone needs a gate with more than 30 inputs; raise the gate count");
      builder_.add_gate(name, kind, args);
      made_.push_back({name, merged});
      signals.push_back({name, std::move(merged)});
    }
    return signals.front().net;
  }

  struct Made {
    std::string net;
    std::vector<std::uint32_t> leaves;
  };

  const GeneratorSpec& spec_;
  Rng rng_;
  NetlistBuilder builder_;
  std::vector<std::string> leaves_;
  std::vector<Made> made_;
  std::size_t gate_counter_ = 0;
};

}  // namespace

Netlist generate(const GeneratorSpec& spec) { return Generator(spec).run(); }

}  // namespace serial
