#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "serial/error.hpp"
#include "serial/graphs.hpp"

namespace serial {

/// Per-iteration record of a propagation run.
///
/// eps_trace[i] is the largest relative mismatch |s_head*df - dw| / dw over
/// all arrows at the end of iteration i+1 (the change the next visit would
/// apply, relative to the weight it would replace). Arrows still carrying
/// zero weight are skipped unless their pending change exceeds kAbsoluteFloor,
/// in which case the iteration reports +infinity.
struct ConvergenceReport {
  int iterations = 0;
  std::vector<double> eps_trace;
  bool converged = false;

  double final_eps() const { return eps_trace.empty() ? 0.0 : eps_trace.back(); }
};

inline constexpr double kAbsoluteFloor = 1e-12;

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, ConvergenceReport report) : Error(what), report_(std::move(report)) {}
  const ConvergenceReport& report() const { return report_; }

 private:
  ConvergenceReport report_;
};

struct PropagationOptions {
  double eps_threshold = 0.01;
  int max_iters = 100;
  bool throw_on_nonconvergence = true;
};

// ---------------------------------------------------------------------------
// Distribution factors

struct Procedure1Result {
  std::vector<std::pair<std::uint32_t, double>> df;  // (sink endpoint, df), sorted by endpoint
  std::vector<double> ls;                            // final logic significance per local node
  std::vector<double> ldw;                           // final weight per arrow
  ConvergenceReport report;
};

/// Breadth-first distribution of the source's unit logic significance over
/// its cone. Each iteration visits every gate once, wave by wave, in name
/// order within a wave.
Procedure1Result procedure1(const LogicGraph& graph, const PropagationOptions& options = {});

struct DFComputation {
  DFMatrix df;
  std::vector<ConvergenceReport> reports;  // per head endpoint (outputs then flip-flops)
  std::vector<std::uint32_t> constant_cones;  // endpoints whose cone transmits nothing
  double mean_iterations = 0.0;
};

/// Runs procedure1 for every output and flip-flop. Endpoints are independent
/// and processed on `threads` workers; results merge in endpoint order.
DFComputation procedure1_all(const Netlist& netlist, const PropagationOptions& options = {}, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Significance

/// Significance of every graph node, indexed like EndpointIndex.
struct SignificanceVector {
  Eigen::VectorXd values;
  std::size_t k = 0, n = 0, m = 0;

  auto s_out() const { return values.head(static_cast<Eigen::Index>(k)); }
  auto s_ff() const { return values.segment(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)); }
  auto s_in() const { return values.tail(static_cast<Eigen::Index>(m)); }
  double operator[](std::uint32_t node) const { return values[node]; }
};

struct Procedure2Result {
  SignificanceVector s;
  ConvergenceReport report;
};

using IterationObserver = std::function<void(int iteration, const Eigen::VectorXd& s)>;

/// Breadth-first propagation from the outputs (held at s_out_init); loops
/// are revisited once per iteration until the mismatch drops below the
/// threshold.
Procedure2Result procedure2(const SignificanceGraph& graph, const Eigen::VectorXd& s_out_init,
                            const PropagationOptions& options = {}, const IterationObserver& observer = {});

/// max |[S_F; S_I] - (C .* DF) [S_O; S_F]|.
double residual(const SignificanceGraph& graph, const SignificanceVector& s);

/// Exact fixed point by sparse LU. Throws SingularSystem when a loop of
/// flip-flops keeps all of its significance (spectral radius of the
/// flip-flop block >= 1).
SignificanceVector direct_solve(const SignificanceGraph& graph, const Eigen::VectorXd& s_out_init);

// ---------------------------------------------------------------------------
// Ranking and cost

enum class WeightMode { Uniform, Pow2 };

/// Output initialization. Pow2 gives bus bits named `bus[i]` weight 2^i;
/// outputs without a bit index keep weight 1.
Eigen::VectorXd output_weights(const EndpointIndex& index, WeightMode mode);

struct RankEntry {
  std::uint32_t node;
  std::string name;
  NodeKind kind;
  double significance;
};

/// Flip-flops and inputs by descending significance, ties by name.
using Ranking = std::vector<RankEntry>;

Ranking rank(const EndpointIndex& index, const SignificanceVector& s);

struct CostEstimate {
  double t1_units = 0.0;  // nodes * iter1 * degree^2
  double t2_units = 0.0;  // iter2 * nodes * degree
};

CostEstimate estimate_cost(const NetlistStats& stats, double iter1, double iter2);

}  // namespace serial
