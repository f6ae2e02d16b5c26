#pragma once

#include <vector>

#include <Eigen/Dense>

#include "slimkit/dataset.hpp"
#include "slimkit/integer_program.hpp"
#include "slimkit/milp.hpp"
#include "slimkit/model_spec.hpp"

namespace slimkit {

/// Closest admissible value (ties toward zero).
double nearest_value(const CoefficientSet& set, double v);

/// Objective of lambda, or +inf when it violates any constraint.
double penalized_objective(const ModelSpec& spec, const Dataset& data, const Eigen::VectorXd& lambda);

/// Best intercept in L_0 for the other coefficients of lambda, judged by the
/// weighted loss with rate caps enforced. Returns lambda(0) when no value
/// satisfies the caps.
double best_intercept(const ModelSpec& spec, const Dataset& data, const Eigen::VectorXd& lambda);

struct LocalSearchOptions {
  int max_passes = 100;
};

/// Best-improvement coordinate search: each move sets one coefficient to any
/// admissible value and re-optimizes the intercept. Never returns a worse
/// vector than `start` (after projection onto L).
Eigen::VectorXd local_search(const ModelSpec& spec, const Dataset& data, Eigen::VectorXd start,
                             const LocalSearchOptions& opts = {});

/// L2-regularized logistic regression by Newton's method (intercept unpenalized).
Eigen::VectorXd logistic_regression(const Dataset& data, const ClassWeights& weights,
                                    double ridge = 1e-3);

/// Good feasible coefficient vector from scaled-and-rounded logistic
/// regression and the zero model, each polished by local_search.
Eigen::VectorXd warm_start(const ModelSpec& spec, const Dataset& data);

/// Node heuristic for solve(): round the relaxation's coefficients, polish
/// briefly, and encode. `ip` and `data` must outlive the returned callable.
Heuristic make_rounding_heuristic(const IntegerProgram& ip, const Dataset& data,
                                  int polish_passes = 2);

}  // namespace slimkit
