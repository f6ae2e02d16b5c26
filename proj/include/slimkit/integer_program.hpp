#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "slimkit/model_spec.hpp"

namespace slimkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { kBinary, kInteger, kContinuous };

enum class VarRole {
  kCoefficient,     // lambda_j
  kLoss,            // psi_i
  kPenalty,         // Phi_j
  kSelection,       // alpha_j
  kMagnitude,       // beta_j
  kLevelSelector,   // u_{j,k} / u_{j,k,r}
  kFeatureUse,      // nu_j
  kRulesPerFeature, // tau_j
  kSignAgreement,   // delta_j
  kPrediction,      // z_i, predicted-positive indicator for the budget
  kProxyLoss,       // theta in cutting-plane proxies
  kOther,
};

std::string to_string(VarRole role);

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInf;
  VarRole role = VarRole::kOther;
  int priority = 0;  // higher classes are branched on first

  bool is_integral() const { return kind != VarKind::kContinuous; }
};

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

/// Where one coefficient lives inside a program. Unused slots are -1.
struct CoefficientEncoding {
  int lambda = -1;
  int alpha = -1;
  int beta = -1;
  int phi = -1;
  std::vector<std::pair<int, double>> selectors;  // (u variable, value)
};

struct TilmGroupEncoding {
  std::vector<int> columns;  // coefficient indices in the group
  int nu = -1;
  int tau = -1;
  int delta = -1;
  int phi = -1;
};

/// A minimization MILP with role tags that let decoders and heuristics map a
/// full assignment back to model coefficients.
class IntegerProgram {
 public:
  int add_variable(Variable v, double objective = 0.0);
  int add_constraint(Constraint c);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(cons_.size()); }
  const Variable& variable(int k) const { return vars_[k]; }
  Variable& variable(int k) { return vars_[k]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const Constraint& constraint(int r) const { return cons_[r]; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const std::vector<double>& objective() const { return objective_; }
  void set_objective(int k, double c) { objective_[k] = c; }

  double objective_value(const std::vector<double>& x) const;

  /// Largest bound, integrality or row violation of x.
  double max_violation(const std::vector<double>& x) const;
  bool is_feasible(const std::vector<double>& x, double tol = 1e-7) const {
    return max_violation(x) <= tol;
  }

  /// Coefficient vector (size P+1) stored in a full assignment.
  Eigen::VectorXd decode_lambda(const std::vector<double>& x) const;

  /// CPLEX-LP-style text: objective, one constraint per line, bounds,
  /// general and binary sections.
  std::string to_lp_format() const;

  // Formulation metadata; filled by the builders.
  std::vector<CoefficientEncoding> coefficients;  // size P+1
  std::vector<int> loss_vars;                     // psi_i, size N (may be empty)
  std::vector<int> prediction_vars;               // z_i, size N when a budget is set
  std::vector<TilmGroupEncoding> tilm_groups;
  int theta = -1;
  std::optional<ModelSpec> spec;
  std::vector<double> big_m;  // per example, when loss rows are present

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::vector<double> objective_;
};

}  // namespace slimkit
