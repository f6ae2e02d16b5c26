#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "slimkit/dataset.hpp"
#include "slimkit/model_spec.hpp"

namespace slimkit {

/// Origin of a rule column, kept so tables can be rendered in source terms.
struct RuleInfo {
  std::string name;
  std::string parent;  // source feature name
  RuleOrigin origin = RuleOrigin::kPassthrough;
  double threshold = 0.0;
  std::string category;
  bool complement = false;

  friend bool operator==(const RuleInfo&, const RuleInfo&) = default;
};

struct TrainedModel {
  ModelFamily family = ModelFamily::kSlim;
  std::vector<std::string> feature_names;  // size P+1, [0] is the intercept
  std::vector<double> coefficients;        // size P+1
  std::vector<RuleInfo> rules;             // rule datasets only: rules[c-1] describes column c
  // original = offset + scale * value for each column; empty when untouched
  std::vector<std::pair<double, double>> transform;
  int model_size = 0;
  double objective = 0.0;
  double error = 0.0;
  double weighted_error = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  std::string status;
  double gap = 0.0;
  double dual_bound = 0.0;

  Eigen::VectorXd lambda() const {
    return Eigen::Map<const Eigen::VectorXd>(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
  }
  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

/// Fills the metric fields by re-scoring `data` with the decision rule.
void set_training_metrics(TrainedModel& model, const Dataset& data, const ClassWeights& weights);

/// Rule descriptions for a binarized dataset.
std::vector<RuleInfo> describe_rules(const Dataset& source, const BinaryRuleSet& rules);

nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

enum class RenderFormat { kScoringTable, kMofNTable, kScoreFunction, kMachineReadable };

RenderFormat parse_render_format(const std::string& text);

/// scoring-table: one row per nonzero coefficient and "PREDICT +1 IF SCORE > t"
/// with t = -lambda_0; category indicators of one feature that share a
/// coefficient are merged into a set-membership row. mofn-table: "PREDICT +1
/// IF AT LEAST M OF THE FOLLOWING N RULES ARE TRUE" with M = 1 - lambda_0.
/// score-function: one-line linear rule. machine-readable: JSON.
std::string render(const TrainedModel& model, RenderFormat format);

/// Every operational constraint violated by `lambda` on `data`, recomputed
/// from the coefficients with the decision rule; empty when certified.
std::vector<std::string> certify(const OperationalConstraints& ops, const InterpretabilitySet& sets,
                                 const Dataset& data, const Eigen::VectorXd& lambda);

}  // namespace slimkit
