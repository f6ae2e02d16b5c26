#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "slimkit/coefficient_set.hpp"
#include "slimkit/dataset.hpp"
#include "slimkit/integer_program.hpp"
#include "slimkit/model_spec.hpp"

namespace slimkit {

struct BigMParameters {
  double margin = 0.1;
  std::vector<double> m;  // per example
};

/// M_i = margin + sum_j max_{v in L_j} (-y_i v x_ij).
BigMParameters compute_big_m(const Dataset& data, const InterpretabilitySet& L, double margin);

/// 0.1 in general, 0.5 when every non-intercept column is 0/1.
double default_margin(const Dataset& data);

/// Half the largest admissible L1 weight: the total L1 term then stays below
/// both the cost of one (cheapest-class) mistake and one unit of C0.
double default_l1_tiebreak(double c0, int n, const InterpretabilitySet& L,
                           const ClassWeights& weights = {});

/// C0 + M/N for a feature with M imputed values.
double adjust_penalty_for_missing(double c0, int missing, int n);

// Spec constructors. A margin <= 0 selects default_margin(data); a negative
// l1_tiebreak is replaced by default_l1_tiebreak.

ModelSpec make_slim_spec(const Dataset& data, InterpretabilitySet L, PenaltyConfig penalty,
                         const ClassWeights& weights, const OperationalConstraints& ops,
                         double margin = -1.0);

ModelSpec make_pilm_spec(const Dataset& data, const CoefficientSet& intercept,
                         std::vector<PenaltyLevel> levels, const ClassWeights& weights,
                         const OperationalConstraints& ops, double margin = -1.0);

/// Requires every non-intercept column to be binary. lambda_0 ranges over
/// Z cap [-P, 0] and every rule weight over {0, 1}.
ModelSpec make_mofn_spec(const Dataset& rules, double c0, const ClassWeights& weights,
                         const OperationalConstraints& ops, double margin = -1.0);

/// `groups` lists the rule columns of each parent feature; columns not in
/// any group become singleton groups.
ModelSpec make_tilm_spec(const Dataset& rules, std::vector<std::vector<int>> groups,
                         InterpretabilitySet L, PenaltyConfig penalty,
                         const ClassWeights& weights, const OperationalConstraints& ops,
                         double margin = -1.0);

/// Big-M integer program for the 0-1 objective of any spec, operational
/// constraints included.
IntegerProgram build_program(const Dataset& data, const ModelSpec& spec);

/// Penalty-only program plus a proxy-loss variable theta >= 0 (objective
/// theta + penalty), to which cutting-plane loops append cuts.
IntegerProgram build_proxy_program(const ModelSpec& spec);

inline IntegerProgram build_slim(const Dataset& data, const InterpretabilitySet& L,
                                 const PenaltyConfig& penalty, const ClassWeights& weights,
                                 const OperationalConstraints& ops, double margin = -1.0) {
  return build_program(data, make_slim_spec(data, L, penalty, weights, ops, margin));
}

inline IntegerProgram build_pilm(const Dataset& data, const CoefficientSet& intercept,
                                 const std::vector<PenaltyLevel>& levels,
                                 const ClassWeights& weights, const OperationalConstraints& ops,
                                 double margin = -1.0) {
  return build_program(data, make_pilm_spec(data, intercept, levels, weights, ops, margin));
}

inline IntegerProgram build_mofn(const Dataset& rules, double c0, const ClassWeights& weights,
                                 const OperationalConstraints& ops, double margin = -1.0) {
  return build_program(rules, make_mofn_spec(rules, c0, weights, ops, margin));
}

inline IntegerProgram build_tilm(const Dataset& rules, const std::vector<std::vector<int>>& groups,
                                 const InterpretabilitySet& L, const PenaltyConfig& penalty,
                                 const ClassWeights& weights, const OperationalConstraints& ops,
                                 double margin = -1.0) {
  return build_program(rules, make_tilm_spec(rules, groups, L, penalty, weights, ops, margin));
}

/// Appends selection and rate constraints. Called by build_program; exposed
/// for programs assembled by hand.
void add_operational_constraints(IntegerProgram& ip, const OperationalConstraints& ops,
                                 const Dataset& data);

/// Full assignment representing lambda in `ip`, or nothing when lambda is
/// not feasible for the program.
std::optional<std::vector<double>> encode_solution(const IntegerProgram& ip, const Dataset& data,
                                                   const Eigen::VectorXd& lambda);

/// Reason the all-zero model is excluded, if it is.
std::optional<std::string> zero_model_obstruction(const ModelSpec& spec, const Dataset& data);

}  // namespace slimkit
