#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "slimkit/integer_program.hpp"

namespace slimkit {

enum class SolveStatus {
  kOptimal,
  kFeasibleTimeLimit,  // a limit stopped the search with an incumbent
  kInfeasible,
  kUnbounded,
  kLimitNoIncumbent,  // a limit stopped the search before any incumbent
};

std::string to_string(SolveStatus status);

/// Proposes a full assignment from the relaxation solution at a node.
using Heuristic = std::function<std::optional<std::vector<double>>(const std::vector<double>&)>;

struct SolveOptions {
  double time_limit = 600.0;  // seconds
  double gap_tolerance = 0.0;
  long node_limit = std::numeric_limits<long>::max();
  int pool_size = 10;
  std::uint64_t seed = 0;  // the search is deterministic; kept for reproducible logs
  std::vector<std::vector<double>> warm_starts;
  Heuristic heuristic;
  long heuristic_frequency = 200;  // nodes between heuristic calls (root always)
};

struct PoolEntry {
  std::vector<double> x;
  double objective = 0.0;
};

struct ProgressPoint {
  double seconds = 0.0;
  long nodes = 0;
  double incumbent = 0.0;
  double bound = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kLimitNoIncumbent;
  std::vector<double> x;
  double objective = std::numeric_limits<double>::infinity();
  double dual_bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  std::vector<PoolEntry> pool;  // best first
  long node_count = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;
  std::vector<ProgressPoint> progress;

  bool has_incumbent() const { return !x.empty(); }
};

/// (objective - bound) / max(|objective|, 1e-10).
double relative_gap(double objective, double bound);

/// Best-bound branch-and-bound over the dual simplex relaxation.
SolveResult solve(const IntegerProgram& ip, const SolveOptions& opts = {});

}  // namespace slimkit
