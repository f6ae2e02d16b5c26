#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "slimkit/benders.hpp"
#include "slimkit/coefficient_set.hpp"
#include "slimkit/dataset.hpp"
#include "slimkit/model_spec.hpp"
#include "slimkit/reduction.hpp"

namespace slimkit {

/// Invalid run configuration; `path` names the offending key (e.g. "constraints.max_fpr").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct IfThenByName {
  std::vector<std::string> antecedents;
  std::string consequent;
};

/// One run. Feature references are by name: a dataset column, or for rule
/// datasets a parent feature standing for all of its rule columns.
struct TrainConfig {
  ModelFamily family = ModelFamily::kSlim;
  std::string data_path;
  std::string schema_path;
  std::string label;
  std::uint64_t seed = 0;

  // interpretability set and penalty
  CoefficientSet intercept = CoefficientSet::symmetric(100);
  CoefficientSet coefficient = CoefficientSet::symmetric(10);
  std::map<std::string, CoefficientSet> feature_sets;
  double c0 = 0.01;
  std::optional<double> c0_over_np;  // when set, C0 = c0_over_np / (N * P) of the training data
  std::map<std::string, double> feature_c0;
  double l1_tiebreak = -1.0;
  std::vector<PenaltyLevel> levels;  // PILM
  double feature_cost = 0.01;        // TILM
  double rule_cost = 0.001;
  int max_rules_per_feature = 3;
  double margin = -1.0;  // <= 0: default for the data

  WeightMode weight_mode = WeightMode::kUnweighted;
  double positive_weight = 0.5;

  // operational constraints
  std::optional<int> max_model_size;
  std::optional<double> max_fpr;
  std::optional<double> max_fnr;
  std::optional<double> max_positive_rate;
  std::map<std::string, SignConstraint> signs;
  std::vector<std::pair<std::string, std::string>> either_or;
  std::vector<IfThenByName> if_then;
  std::vector<std::pair<std::string, std::string>> hierarchy;

  // data preparation
  ThresholdPolicy thresholds;  // M-of-N and TILM rule construction
  bool normalize = true;       // scale non-integer real features to [0, 1]

  // solver
  double time_limit = 600.0;
  double gap_tolerance = 0.0;
  long node_limit = std::numeric_limits<long>::max();
  long heuristic_frequency = 200;
  bool warm_start = true;

  // data reduction before training
  bool reduce = false;
  ProxyKind proxy = ProxyKind::kRelaxation;
  std::optional<double> level_set_width;  // default: from the warm start
  bool remove_fixed_correct = false;

  // convex-loss training by cutting planes
  bool benders = false;
  LossKind loss = LossKind::kLogistic;
  double benders_gap = 1e-6;
  int benders_max_iterations = 1000;

  // cross-validation and sweeps
  int folds = 10;
  int threads = 1;
  std::vector<double> sweep_c0;
  double holdout = 0.3;
};

/// Unknown keys are rejected so typos do not silently fall back to defaults.
TrainConfig parse_config(const nlohmann::json& doc);
TrainConfig load_config(const std::string& path);
nlohmann::json config_to_json(const TrainConfig& config);

CoefficientSet parse_coefficient_set(const nlohmann::json& doc, const std::string& path);

}  // namespace slimkit
