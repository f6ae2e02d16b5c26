#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slimkit/dataset.hpp"
#include "slimkit/milp.hpp"
#include "slimkit/model_spec.hpp"

namespace slimkit {

enum class LossKind { kHinge, kQuadratic, kLogistic, kExponential };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& text);

struct OracleValue {
  double value = 0.0;
  Eigen::VectorXd gradient;  // a subgradient, size P+1
};

/// Aggregate convex loss (1/N) sum_i 2 W_{y_i} l(y_i lambda^T x_i) and one
/// subgradient, with
///   hinge        l(m) = max(0, 1 - m)      l'(m) = -1[m < 1]
///   quadratic    l(m) = (1 - m)^2          l'(m) = -2 (1 - m)
///   logistic     l(m) = log(1 + e^{-m})    l'(m) = -sigma(-m)
///   exponential  l(m) = e^{1 - m}          l'(m) = -e^{1 - m}
/// Per-example terms are summed in index order, so results are reproducible.
OracleValue oracle_eval(LossKind kind, const Eigen::VectorXd& lambda, const Dataset& data,
                        const ClassWeights& weights = {});

/// Supporting hyperplane theta >= value + gradient^T (lambda - anchor).
struct Cut {
  Eigen::VectorXd anchor;
  double value = 0.0;
  Eigen::VectorXd gradient;

  double at(const Eigen::VectorXd& lambda) const {
    return value + gradient.dot(lambda - anchor);
  }
};

class CutPool {
 public:
  void add(Cut cut) { cuts_.push_back(std::move(cut)); }
  const std::vector<Cut>& cuts() const { return cuts_; }
  int size() const { return static_cast<int>(cuts_.size()); }
  bool has_anchor(const Eigen::VectorXd& lambda) const;
  /// Piecewise-linear model max_k cut_k(lambda); 0 when empty (losses are >= 0).
  double model(const Eigen::VectorXd& lambda) const;

 private:
  std::vector<Cut> cuts_;
};

struct BendersIteration {
  int k = 0;
  Eigen::VectorXd lambda;
  double objective = 0.0;    // Z(lambda^k)
  double lower_bound = 0.0;  // LB^k
  double upper_bound = 0.0;  // best Z so far
  double oracle_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct BendersTrace {
  std::vector<BendersIteration> iterations;

  /// Header k,LB,UB,gap,oracle_seconds,solve_seconds; one row per iteration.
  std::string to_csv() const;
};

struct BendersOptions {
  double gap_tolerance = 1e-6;  // stop once UB - LB <= this
  int max_iterations = 1000;
  double time_limit = 3600.0;
  SolveOptions proxy;  // options for each proxy solve (time limit is capped by the remaining budget)
};

struct BendersResult {
  Eigen::VectorXd lambda;  // incumbent achieving UB
  double objective = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool converged = false;
  std::string stop_reason;  // "gap", "repeated", "iterations", "time"
  BendersTrace trace;
  CutPool cuts;
};

/// Z(lambda) = loss(lambda) + interpretability penalty.
double benders_objective(LossKind kind, const ModelSpec& spec, const Dataset& data,
                         const Eigen::VectorXd& lambda);

/// Cutting-plane minimization of loss + penalty over spec.coefficients,
/// honoring the selection constraints in spec.ops. Each proxy
/// min theta + Phi(lambda), theta >= 0, theta >= every cut, is solved by
/// branch-and-bound; LB is its dual bound and UB the best objective seen.
BendersResult benders_solve(const Dataset& data, LossKind kind, const ModelSpec& spec,
                            const BendersOptions& opts = {});

}  // namespace slimkit
