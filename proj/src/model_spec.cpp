#include "slimkit/model_spec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slimkit {

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::kSlim:
      return "slim";
    case ModelFamily::kPilm:
      return "pilm";
    case ModelFamily::kMofN:
      return "mofn";
    case ModelFamily::kTilm:
      return "tilm";
  }
  return "slim";
}

ModelFamily parse_model_family(const std::string& text) {
  if (text == "slim") return ModelFamily::kSlim;
  if (text == "pilm") return ModelFamily::kPilm;
  if (text == "mofn") return ModelFamily::kMofN;
  if (text == "tilm") return ModelFamily::kTilm;
  throw std::invalid_argument("unknown model family '" + text + "'");
}

double PenaltyConfig::level_cost(double value) const {
  for (const auto& level : levels) {
    for (double v : level.values) {
      if (v == value) return level.cost;
    }
  }
  return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

void PenaltyConfig::validate() const {
  if (c0 < 0.0) throw std::invalid_argument("c0 must be non-negative");
  for (size_t j = 1; j < c0_per_feature.size(); ++j) {
    if (c0_per_feature[j] < 0.0) throw std::invalid_argument("per-feature c0 must be non-negative");
  }
  for (size_t r = 1; r < levels.size(); ++r) {
    if (!(levels[r].cost > levels[r - 1].cost)) {
      throw std::invalid_argument("personalized level costs must be strictly increasing");
    }
  }
  for (size_t r = 0; r < levels.size(); ++r) {
    for (size_t s = r + 1; s < levels.size(); ++s) {
      for (double v : levels[r].values) {
        for (double w : levels[s].values) {
          if (v == w) {
            throw std::invalid_argument("value " + std::to_string(v) +
                                        " appears in two personalized levels");
          }
        }
      }
    }
  }
  if (family == ModelFamily::kTilm && max_rules_per_feature < 1) {
    throw std::invalid_argument("max rules per feature must be at least 1");
  }
}

void OperationalConstraints::validate(int p) const {
  auto check_fraction = [](const std::optional<double>& f, const char* name) {
    if (f && !(*f >= 0.0 && *f <= 1.0)) {
      throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
  };
  check_fraction(max_fpr, "max_fpr");
  check_fraction(max_fnr, "max_fnr");
  check_fraction(max_positive_rate, "max_positive_rate");
  if (max_model_size && *max_model_size < 0) {
    throw std::invalid_argument("max_model_size must be non-negative");
  }
  auto check_index = [p](int j) {
    if (j < 1 || j > p) throw std::invalid_argument("feature index " + std::to_string(j) +
                                                    " outside 1.." + std::to_string(p));
  };
  for (auto [a, b] : either_or) {
    check_index(a);
    check_index(b);
  }
  for (const auto& rule : if_then) {
    for (int a : rule.antecedents) check_index(a);
    check_index(rule.consequent);
  }
  for (auto [leaf, node] : hierarchy) {
    check_index(leaf);
    check_index(node);
  }
  if (signs.size() > static_cast<size_t>(p) + 1) {
    throw std::invalid_argument("sign map longer than the coefficient vector");
  }
}

double weighted_loss(const Dataset& data, const Eigen::VectorXd& scores,
                     const ClassWeights& weights, double margin) {
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    if (is_error(scores(i), data.y(i), margin)) total += weights.scale(data.y(i));
  }
  return total / data.n();
}

int model_size(const Eigen::VectorXd& lambda) {
  int count = 0;
  for (Eigen::Index j = 1; j < lambda.size(); ++j) count += lambda(j) != 0.0;
  return count;
}

double interpretability_penalty(const ModelSpec& spec, const Eigen::VectorXd& lambda) {
  const auto& pen = spec.penalty;
  double total = 0.0;
  switch (spec.family) {
    case ModelFamily::kSlim:
    case ModelFamily::kMofN:
      for (Eigen::Index j = 1; j < lambda.size(); ++j) {
        if (lambda(j) != 0.0) total += pen.c0_for(static_cast<int>(j));
        total += std::max(pen.l1_tiebreak, 0.0) * std::abs(lambda(j));
      }
      break;
    case ModelFamily::kPilm:
      for (Eigen::Index j = 1; j < lambda.size(); ++j) total += pen.level_cost(lambda(j));
      break;
    case ModelFamily::kTilm:
      for (const auto& group : spec.groups) {
        int used = 0;
        for (int c : group) used += lambda(c) != 0.0;
        if (used > 0) total += pen.feature_cost + pen.rule_cost * (used - 1);
      }
      for (Eigen::Index j = 1; j < lambda.size(); ++j) {
        total += std::max(pen.l1_tiebreak, 0.0) * std::abs(lambda(j));
      }
      break;
  }
  return total;
}

std::optional<std::string> structural_violation(const ModelSpec& spec,
                                                const Eigen::VectorXd& lambda) {
  if (!spec.coefficients.contains(lambda)) return "coefficient outside its admissible set";
  const auto& ops = spec.ops;
  if (ops.max_model_size && model_size(lambda) > *ops.max_model_size) {
    return "model size " + std::to_string(model_size(lambda)) + " exceeds " +
           std::to_string(*ops.max_model_size);
  }
  for (auto [a, b] : ops.either_or) {
    if (lambda(a) != 0.0 && lambda(b) != 0.0) {
      return "either-or constraint on " + std::to_string(a) + "," + std::to_string(b);
    }
  }
  for (const auto& rule : ops.if_then) {
    if (lambda(rule.consequent) != 0.0) continue;
    for (int a : rule.antecedents) {
      if (lambda(a) != 0.0) return "if-then constraint on " + std::to_string(rule.consequent);
    }
  }
  for (auto [leaf, node] : ops.hierarchy) {
    if (lambda(leaf) != 0.0 && lambda(node) == 0.0) {
      return "hierarchy constraint " + std::to_string(leaf) + "->" + std::to_string(node);
    }
  }
  if (spec.family == ModelFamily::kTilm) {
    for (size_t g = 0; g < spec.groups.size(); ++g) {
      int used = 0;
      bool pos = false;
      bool neg = false;
      for (int c : spec.groups[g]) {
        used += lambda(c) != 0.0;
        pos = pos || lambda(c) > 0.0;
        neg = neg || lambda(c) < 0.0;
      }
      if (used > spec.penalty.max_rules_per_feature) {
        return "feature group " + std::to_string(g) + " uses too many rules";
      }
      if (pos && neg) return "feature group " + std::to_string(g) + " mixes signs";
    }
  }
  return std::nullopt;
}

std::optional<std::string> rate_violation(const ModelSpec& spec, const Dataset& data,
                                          const Eigen::VectorXd& scores) {
  const auto& ops = spec.ops;
  if (!ops.has_rate_constraints()) return std::nullopt;
  int fp = 0;
  int fn = 0;
  int predicted_positive = 0;
  for (int i = 0; i < data.n(); ++i) {
    const bool positive_call = is_error(scores(i), -1, spec.margin);
    predicted_positive += positive_call;
    if (data.y(i) < 0) {
      fp += positive_call;
    } else {
      fn += is_error(scores(i), 1, spec.margin);
    }
  }
  if (ops.max_fpr && fp > rate_cap(*ops.max_fpr, data.n_negative())) {
    return "false positive rate above " + std::to_string(*ops.max_fpr);
  }
  if (ops.max_fnr && fn > rate_cap(*ops.max_fnr, data.n_positive())) {
    return "false negative rate above " + std::to_string(*ops.max_fnr);
  }
  if (ops.max_positive_rate && predicted_positive > rate_cap(*ops.max_positive_rate, data.n())) {
    return "positive prediction rate above " + std::to_string(*ops.max_positive_rate);
  }
  return std::nullopt;
}

Evaluation evaluate(const ModelSpec& spec, const Dataset& data, const Eigen::VectorXd& lambda) {
  Evaluation e;
  const Eigen::VectorXd scores = data.X * lambda;
  e.loss = spec.loss_scale * weighted_loss(data, scores, spec.weights, spec.margin);
  e.penalty = interpretability_penalty(spec, lambda);
  e.objective = e.loss + e.penalty;
  if (auto v = structural_violation(spec, lambda)) {
    e.feasible = false;
    e.violation = *v;
  } else if (auto r = rate_violation(spec, data, scores)) {
    e.feasible = false;
    e.violation = *r;
  }
  return e;
}

ClassificationMetrics classification_metrics(const Dataset& data, const Eigen::VectorXd& lambda,
                                             const ClassWeights& weights) {
  ClassificationMetrics m;
  const Eigen::VectorXd scores = data.X * lambda;
  double weighted = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double s = scores(i);
    if (data.y(i) > 0) {
      if (s > 0.0) {
        ++m.true_positives;
      } else {
        ++m.false_negatives;
        weighted += weights.scale(1);
      }
    } else {
      if (s <= 0.0) {
        ++m.true_negatives;
      } else {
        ++m.false_positives;
        weighted += weights.scale(-1);
      }
    }
  }
  const int n = data.n();
  m.error = n > 0 ? static_cast<double>(m.false_positives + m.false_negatives) / n : 0.0;
  m.weighted_error = n > 0 ? weighted / n : 0.0;
  m.tpr = data.n_positive() > 0 ? static_cast<double>(m.true_positives) / data.n_positive() : 0.0;
  m.fpr = data.n_negative() > 0 ? static_cast<double>(m.false_positives) / data.n_negative() : 0.0;
  return m;
}

}  // namespace slimkit
