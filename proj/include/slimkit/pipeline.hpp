#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slimkit/benders.hpp"
#include "slimkit/config.hpp"
#include "slimkit/dataset.hpp"
#include "slimkit/milp.hpp"
#include "slimkit/model.hpp"
#include "slimkit/model_spec.hpp"
#include "slimkit/reduction.hpp"

namespace slimkit {

/// Training data in model space: rule columns for M-of-N and TILM, optionally
/// normalized real columns otherwise.
struct PreparedData {
  Dataset data;
  std::vector<std::string> source_names;  // loaded feature names, [0] is the intercept
  std::vector<RuleInfo> rules;
  std::vector<std::vector<int>> groups;  // rule columns of each source feature with any rules
  std::vector<std::pair<double, double>> transform;
};

Dataset load_training_data(const TrainConfig& config);
PreparedData prepare(const Dataset& raw, const TrainConfig& config);

/// Columns a configured name refers to: the column itself, or every rule
/// column derived from a source feature of that name.
std::vector<int> resolve_feature(const PreparedData& prepared, const std::string& name);

/// Spec for `train`, a row subset of prepared.data. Weights and C0 = c0_over_np/(N P)
/// are computed on `train`.
ModelSpec make_spec(const PreparedData& prepared, const Dataset& train, const TrainConfig& config);

struct TrainResult {
  SolveStatus status = SolveStatus::kLimitNoIncumbent;
  TrainedModel model;  // empty coefficients without an incumbent
  ModelSpec spec;
  std::optional<ReductionResult> reduction;
  std::optional<BendersTrace> benders;
  double wall_time = 0.0;
  long nodes = 0;

  bool has_model() const { return !model.coefficients.empty(); }
};

/// Solves, decodes, re-scores on `train` and certifies every operational
/// constraint; throws std::runtime_error if certification fails.
TrainResult train_model(const PreparedData& prepared, const Dataset& train, const TrainConfig& config);

/// Fold id of every example: classes are shuffled separately with `seed` and
/// dealt round-robin, so fold sizes and class balance differ by at most one.
std::vector<int> stratified_folds(const Dataset& data, int folds, std::uint64_t seed);

struct FoldResult {
  int fold = 0;
  int n_train = 0;
  int n_test = 0;
  double train_error = 0.0;
  double test_error = 0.0;
  int model_size = 0;
  std::string status;
  double gap = 0.0;
  double wall_time = 0.0;
  std::vector<double> coefficients;
};

struct CvResult {
  std::vector<FoldResult> folds;
  TrainResult final_model;  // trained on all the data
  double mean_test_error = 0.0;
  double std_test_error = 0.0;  // sample standard deviation across folds
  double mean_train_error = 0.0;
  double median_model_size = 0.0;
  int min_model_size = 0;
  int max_model_size = 0;

  /// One row per fold plus a final "all" row for the full-data model.
  std::string to_csv() const;
};

/// One training run per fold (concurrently with config.threads workers) plus
/// the final full-data model.
CvResult cross_validate(const PreparedData& prepared, const TrainConfig& config);

struct SweepRow {
  double c0 = 0.0;
  double train_error = 0.0;
  double test_error = 0.0;
  int model_size = 0;
  std::string status;
  std::vector<double> coefficients;
};

/// Trains once per C0 on a stratified split (config.holdout held out),
/// config.threads points at a time.
std::vector<SweepRow> sweep_regularization(const PreparedData& prepared, const TrainConfig& config,
                                           const std::vector<double>& c0_values);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace slimkit
