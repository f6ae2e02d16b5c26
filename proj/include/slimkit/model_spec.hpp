#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "slimkit/coefficient_set.hpp"
#include "slimkit/dataset.hpp"

namespace slimkit {

enum class ModelFamily { kSlim, kPilm, kMofN, kTilm };

std::string to_string(ModelFamily family);
ModelFamily parse_model_family(const std::string& text);

/// One tier of a personalized penalty: every value in `values` costs `cost`.
struct PenaltyLevel {
  std::vector<double> values;
  double cost = 0.0;
};

struct PenaltyConfig {
  ModelFamily family = ModelFamily::kSlim;

  // SLIM / M-of-N
  double c0 = 0.01;
  std::vector<double> c0_per_feature;  // optional; index 0 unused
  double l1_tiebreak = -1.0;           // negative: derive from c0, N and L

  // PILM, ordered by strictly increasing cost
  std::vector<PenaltyLevel> levels;

  // TILM
  double feature_cost = 0.01;
  double rule_cost = 0.001;
  int max_rules_per_feature = 3;

  double c0_for(int j) const {
    return static_cast<size_t>(j) < c0_per_feature.size() ? c0_per_feature[j] : c0;
  }
  /// Personalized cost of a value; 0 for an unlisted zero, +inf otherwise.
  double level_cost(double value) const;
  void validate() const;
};

struct IfThenConstraint {
  std::vector<int> antecedents;
  int consequent = 0;
};

/// Hard constraints on the trained model. Feature indices refer to dataset
/// columns (1..P); for rule datasets these are rule columns.
struct OperationalConstraints {
  std::optional<int> max_model_size;
  std::optional<double> max_fpr;
  std::optional<double> max_fnr;
  std::optional<double> max_positive_rate;  // intervention budget
  std::vector<SignConstraint> signs;        // optional; index 0 is the intercept
  std::vector<std::pair<int, int>> either_or;
  std::vector<IfThenConstraint> if_then;
  std::vector<std::pair<int, int>> hierarchy;  // (leaf, ancestor)

  bool has_rate_constraints() const {
    return max_fpr.has_value() || max_fnr.has_value() || max_positive_rate.has_value();
  }
  bool has_selection_constraints() const {
    return max_model_size.has_value() || !either_or.empty() || !if_then.empty() ||
           !hierarchy.empty();
  }
  SignConstraint sign(int j) const {
    return static_cast<size_t>(j) < signs.size() ? signs[j] : SignConstraint::kFree;
  }
  void validate(int p) const;
};

/// Everything needed to evaluate the training objective of a discrete linear
/// model directly, without an integer program.
struct ModelSpec {
  ModelFamily family = ModelFamily::kSlim;
  InterpretabilitySet coefficients;  // effective sets (sign restrictions applied)
  PenaltyConfig penalty;             // l1_tiebreak resolved
  ClassWeights weights;
  OperationalConstraints ops;
  double margin = 0.1;
  std::vector<std::vector<int>> groups;  // TILM: rule columns per parent feature
  // Multiplies the loss term. A reduced training set uses M/N so the loss keeps
  // its full-data normalization.
  double loss_scale = 1.0;
};

/// Misclassification under the Big-M convention: with margin > 0 an example
/// counts as an error when y * score < margin; with margin <= 0 the plain
/// decision rule y * score <= 0 applies.
inline bool is_error(double score, int label, double margin) {
  const double s = label * score;
  return margin > 0.0 ? s < margin : s <= 0.0;
}

/// Largest count allowed by a rate cap `fraction` over `n` examples.
inline int rate_cap(double fraction, int n) {
  return static_cast<int>(std::floor(fraction * n + 1e-9));
}

/// (1/N) sum_i 2 W_{y_i} 1[error_i].
double weighted_loss(const Dataset& data, const Eigen::VectorXd& scores,
                     const ClassWeights& weights, double margin);

double interpretability_penalty(const ModelSpec& spec, const Eigen::VectorXd& lambda);

int model_size(const Eigen::VectorXd& lambda);

/// Empty when lambda satisfies membership, family structure (TILM rule cap and
/// sign agreement) and every selection constraint; otherwise the violation.
std::optional<std::string> structural_violation(const ModelSpec& spec,
                                                const Eigen::VectorXd& lambda);

/// Same for the error-rate and prediction-budget constraints.
std::optional<std::string> rate_violation(const ModelSpec& spec, const Dataset& data,
                                          const Eigen::VectorXd& scores);

struct Evaluation {
  double loss = 0.0;
  double penalty = 0.0;
  double objective = 0.0;
  bool feasible = true;
  std::string violation;
};

Evaluation evaluate(const ModelSpec& spec, const Dataset& data, const Eigen::VectorXd& lambda);

struct ClassificationMetrics {
  int true_positives = 0;
  int false_positives = 0;
  int true_negatives = 0;
  int false_negatives = 0;
  double error = 0.0;           // (FP + FN) / N
  double weighted_error = 0.0;  // class-weighted, same scale as the loss
  double tpr = 0.0;
  double fpr = 0.0;
};

/// Metrics of the decision rule "predict +1 iff score > 0", the rule a
/// rendered table states; a score of exactly 0 predicts -1.
ClassificationMetrics classification_metrics(const Dataset& data, const Eigen::VectorXd& lambda,
                                             const ClassWeights& weights = {});

}  // namespace slimkit
