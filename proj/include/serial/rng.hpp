#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <vector>

namespace serial {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` under a run seed. Stream 0 drives input
/// stimulus, stream 1 the initial state, stream 2+f the flips of flip-flop f
/// (netlist order), so changing the victim set never shifts another
/// flip-flop's flip times.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

inline constexpr std::uint64_t kInputStream = 0;
inline constexpr std::uint64_t kInitialStateStream = 1;
inline constexpr std::uint64_t flip_stream(std::uint32_t flipflop) { return 2 + std::uint64_t{flipflop}; }

using Rng = std::mt19937_64;

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Number of failed Bernoulli(p) trials before the first success.
inline std::uint64_t geometric_gap(Rng& rng, double p) {
  constexpr auto kNever = std::numeric_limits<std::uint64_t>::max();
  if (p <= 0.0) return kNever;
  if (p >= 1.0) return 0;
  const double gap = std::floor(std::log1p(-uniform01(rng)) / std::log1p(-p));
  return gap >= 1.8e19 ? kNever : static_cast<std::uint64_t>(gap);
}

/// Per-cycle Bernoulli flips for a victim set, sampled as geometric gaps on
/// one substream per flip-flop. Cycles must be queried in increasing order.
class FlipSchedule {
 public:
  FlipSchedule(const std::vector<std::uint32_t>& victims, double rate, std::uint64_t seed) : rate_(rate) {
    for (auto ff : victims) {
      streams_.emplace_back(substream_seed(seed, flip_stream(ff)));
      flipflops_.push_back(ff);
      const auto slot = static_cast<std::uint32_t>(flipflops_.size() - 1);
      schedule(slot, 0);
    }
  }

  /// Calls fn(flipflop) for every flip in `cycle`.
  template <class Fn>
  void flips_at(std::uint64_t cycle, Fn&& fn) {
    while (!queue_.empty() && queue_.top().first <= cycle) {
      const auto [when, slot] = queue_.top();
      queue_.pop();
      if (when == cycle) fn(flipflops_[slot]);
      schedule(slot, when + 1);
    }
  }

  std::uint64_t next_flip() const {
    return queue_.empty() ? std::numeric_limits<std::uint64_t>::max() : queue_.top().first;
  }

 private:
  void schedule(std::uint32_t slot, std::uint64_t from) {
    const auto gap = geometric_gap(streams_[slot], rate_);
    if (gap == std::numeric_limits<std::uint64_t>::max() || from + gap < from) return;
    queue_.emplace(from + gap, slot);
  }

  using Entry = std::pair<std::uint64_t, std::uint32_t>;
  double rate_;
  std::vector<Rng> streams_;
  std::vector<std::uint32_t> flipflops_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue_;
};

}  // namespace serial
