#pragma once

#include <set>
#include <string>
#include <vector>

#include "serial/faultsim.hpp"
#include "serial/hardening.hpp"
#include "serial/influence.hpp"
#include "serial/oracle.hpp"
#include "serial/propagation.hpp"

namespace serial {

struct RankOptions {
  PropagationOptions procedure1;
  PropagationOptions procedure2;
  std::set<std::string> clk_reset;
  WeightMode weights = WeightMode::Uniform;
  unsigned threads = 1;
};

/// Everything the rank pipeline produces, kept for reporting.
struct RankRun {
  EndpointIndex index;
  DFComputation df;
  SignificanceGraph graph;
  Procedure2Result significance;
  Ranking ranking;
  NetlistStats stats;
  double residual = 0.0;
};

/// Distribution factors, significance propagation and ranking in one call.
RankRun run_rank(const Netlist& netlist, const RankOptions& options = {});

/// Shortest decimal that reads back to the same double.
std::string format_double(double value);

std::string ranking_csv(const Ranking& ranking);
/// Reads a ranking written by ranking_csv and re-binds it to `index`.
Ranking parse_ranking_csv(const std::string& text, const EndpointIndex& index);

/// {"iterations", "eps_trace", "residual"}; infinite entries are written as null.
std::string convergence_json(const ConvergenceReport& report, double residual);

std::string df_csv(const SignificanceGraph& graph);
std::string df_convergence_csv(const EndpointIndex& index, const DFComputation& df);
std::string stats_json(const Netlist& netlist, const NetlistStats& stats);
std::string ldf_csv(const std::string& kind, const InfluenceVector& influence);
std::string mismatch_csv(const Netlist& netlist, const MismatchReport& report);
std::string groups_csv(const Netlist& netlist, const std::vector<GroupResult>& groups);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string oracle_csv(const OracleReport& report);

}  // namespace serial
