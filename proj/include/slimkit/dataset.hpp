#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace slimkit {

enum class FeatureKind { kBinary, kCategorical, kReal };

std::string to_string(FeatureKind kind);
FeatureKind parse_feature_kind(const std::string& text);

/// Raised for malformed input files. `row` and `column` are 1-based data
/// coordinates (the header is not counted); 0 means "not applicable".
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, int row = 0, int column = 0);
  int row() const { return row_; }
  int column() const { return column_; }

 private:
  int row_;
  int column_;
};

struct Example {
  Eigen::VectorXd features;  // features[0] == 1
  int label = 1;             // -1 or +1
};

/// Labeled examples with an intercept column materialized at index 0.
///
/// `X` is N x (P+1) with X(:,0) == 1. Categorical columns hold the 0-based
/// category code; the category names live in `categories`.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXi y;
  std::vector<std::string> feature_names;  // size P+1, [0] is the intercept
  std::vector<FeatureKind> kinds;          // size P+1
  std::vector<std::vector<std::string>> categories;
  std::vector<int> positive_index;  // 0-based rows with y == +1
  std::vector<int> negative_index;  // 0-based rows with y == -1

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()) - 1; }
  int n_positive() const { return static_cast<int>(positive_index.size()); }
  int n_negative() const { return static_cast<int>(negative_index.size()); }

  Example example(int i) const { return {X.row(i).transpose(), y(i)}; }

  /// Rows in the given order; duplicates allowed.
  Dataset subset(std::span<const int> rows) const;

  /// Rebuilds the class index sets and checks every invariant.
  void finalize();
  void validate() const;
};

/// Builds a dataset from a dense feature block (without the intercept) and
/// +/-1 labels. Every column is declared real unless `kinds` is given.
Dataset make_dataset(const Eigen::MatrixXd& features, const Eigen::VectorXi& labels,
                     std::vector<std::string> names = {},
                     std::vector<FeatureKind> kinds = {});

enum class LabelMapping {
  kPlusMinusOne,  // labels are -1 / +1
  kZeroOne,       // labels are 0 / 1, mapped to -1 / +1
};

struct Schema {
  std::string label_column;
  LabelMapping label_mapping = LabelMapping::kPlusMinusOne;
  std::map<std::string, FeatureKind> kinds;  // missing columns default to real
};

/// Reads `name=kind` lines; `#` starts a comment.
Schema read_schema(const std::string& path);

Dataset load_dataset(const std::string& path, const Schema& schema);
Dataset parse_dataset(std::istream& in, const Schema& schema);

struct ClassWeights {
  double positive = 0.5;
  double negative = 0.5;

  /// Per-example multiplier. The loss is (1/N) sum_i 2 W_{y_i} loss_i so that
  /// equal weights reproduce the plain error rate.
  double scale(int label) const { return 2.0 * (label > 0 ? positive : negative); }
  void validate() const;
};

enum class WeightMode {
  kUnweighted,
  kBalanced,
  kAllNegativesCorrect,
  kAllPositivesCorrect,
  kExplicit,
};

WeightMode parse_weight_mode(const std::string& text);

ClassWeights make_weights(const Dataset& data, WeightMode mode, double explicit_positive = 0.5);

enum class RuleOrigin { kPassthrough, kCategoryIndicator, kThreshold };

struct BinaryRule {
  int parent_feature = 0;  // column in the source dataset (1..P)
  RuleOrigin origin = RuleOrigin::kPassthrough;
  double threshold = 0.0;  // x >= threshold, for kThreshold
  int category = -1;       // code, for kCategoryIndicator
  bool complement = false; // rule is 1 - h
  std::string name;
};

/// Rule column c of the rule dataset corresponds to rules[c - 1].
struct BinaryRuleSet {
  std::vector<BinaryRule> rules;
  std::vector<std::vector<int>> columns_by_feature;  // parent feature -> rule columns

  int rule_count(int parent_feature) const {
    return static_cast<int>(columns_by_feature.at(parent_feature).size());
  }
};

enum class ThresholdPolicyKind {
  kAllAdjacentMidpoints,  // every midpoint between adjacent distinct values
  kExplicitList,          // the same thresholds for every real feature
  kDomainSupplied,        // thresholds per feature name
};

struct ThresholdPolicy {
  ThresholdPolicyKind kind = ThresholdPolicyKind::kAllAdjacentMidpoints;
  std::vector<double> thresholds;
  std::map<std::string, std::vector<double>> per_feature;
  bool include_complements = false;
};

std::pair<Dataset, BinaryRuleSet> binarize(const Dataset& data, const ThresholdPolicy& policy);

/// Midpoints between adjacent distinct sorted values of a column.
std::vector<double> adjacent_midpoints(std::span<const double> values);

/// Scales real, non-integer columns to [0, 1]. Returns per-column (offset,
/// scale) so that original = offset + scale * scaled; identity for untouched
/// columns.
std::vector<std::pair<double, double>> normalize_real_features(Dataset& data);

}  // namespace slimkit
