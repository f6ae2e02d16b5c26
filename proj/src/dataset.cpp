#include "slimkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace slimkit {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool is_integer_valued(double v) { return std::floor(v) == v; }

std::string format_threshold(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kBinary:
      return "binary";
    case FeatureKind::kCategorical:
      return "categorical";
    case FeatureKind::kReal:
      return "real";
  }
  return "real";
}

FeatureKind parse_feature_kind(const std::string& text) {
  if (text == "binary") return FeatureKind::kBinary;
  if (text == "categorical") return FeatureKind::kCategorical;
  if (text == "real") return FeatureKind::kReal;
  throw DataError("unknown feature kind '" + text + "'");
}

DataError::DataError(const std::string& what, int row, int column)
    : std::runtime_error([&] {
        std::string msg = what;
        if (row > 0) msg += " (row " + std::to_string(row);
        if (row > 0 && column > 0) msg += ", column " + std::to_string(column);
        if (row > 0) msg += ")";
        return msg;
      }()),
      row_(row),
      column_(column) {}

Dataset Dataset::subset(std::span<const int> rows) const {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t k = 0; k < rows.size(); ++k) {
    out.X.row(static_cast<Eigen::Index>(k)) = X.row(rows[k]);
    out.y(static_cast<Eigen::Index>(k)) = y(rows[k]);
  }
  out.feature_names = feature_names;
  out.kinds = kinds;
  out.categories = categories;
  out.finalize();
  return out;
}

void Dataset::finalize() {
  positive_index.clear();
  negative_index.clear();
  for (int i = 0; i < n(); ++i) {
    (y(i) > 0 ? positive_index : negative_index).push_back(i);
  }
  if (feature_names.size() != static_cast<size_t>(X.cols())) {
    feature_names.resize(X.cols());
    feature_names[0] = "(Intercept)";
    for (int j = 1; j < X.cols(); ++j) {
      if (feature_names[j].empty()) feature_names[j] = "x" + std::to_string(j);
    }
  }
  if (kinds.size() != static_cast<size_t>(X.cols())) kinds.resize(X.cols(), FeatureKind::kReal);
  if (categories.size() != static_cast<size_t>(X.cols())) categories.resize(X.cols());
  validate();
}

void Dataset::validate() const {
  if (X.cols() < 1) throw DataError("dataset has no intercept column");
  if (X.rows() != y.size()) throw DataError("feature/label row count mismatch");
  for (int i = 0; i < n(); ++i) {
    if (X(i, 0) != 1.0) throw DataError("intercept slot must equal 1", i + 1, 1);
    if (y(i) != 1 && y(i) != -1) throw DataError("label must be -1 or +1", i + 1);
  }
  if (positive_index.size() + negative_index.size() != static_cast<size_t>(n())) {
    throw DataError("class index sets do not partition the examples");
  }
}

Dataset make_dataset(const Eigen::MatrixXd& features, const Eigen::VectorXi& labels,
                     std::vector<std::string> names, std::vector<FeatureKind> kinds) {
  Dataset d;
  d.X.resize(features.rows(), features.cols() + 1);
  d.X.col(0).setOnes();
  d.X.rightCols(features.cols()) = features;
  d.y = labels;
  d.feature_names.push_back("(Intercept)");
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    d.feature_names.push_back(static_cast<size_t>(j) < names.size() ? names[j]
                                                                    : "x" + std::to_string(j + 1));
  }
  d.kinds.push_back(FeatureKind::kBinary);
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    d.kinds.push_back(static_cast<size_t>(j) < kinds.size() ? kinds[j] : FeatureKind::kReal);
  }
  d.finalize();
  return d;
}

Schema read_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file '" + path + "'");
  Schema schema;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw DataError("schema line without '='", line_no);
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    schema.kinds[key] = parse_feature_kind(value);
  }
  return schema;
}

Dataset load_dataset(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return parse_dataset(in, schema);
}

Dataset parse_dataset(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty dataset: missing header");
  const auto header = split_csv_line(line);

  int label_col = static_cast<int>(header.size()) - 1;
  if (!schema.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), schema.label_column);
    if (it == header.end()) throw DataError("label column '" + schema.label_column + "' not found");
    label_col = static_cast<int>(it - header.begin());
  }

  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (c != label_col) feature_cols.push_back(c);
  }

  std::vector<std::vector<std::string>> raw;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      static_cast<int>(raw.size()) + 1,
                      static_cast<int>(std::min(fields.size(), header.size())) + 1);
    }
    raw.push_back(std::move(fields));
  }
  if (raw.empty()) throw DataError("empty dataset: no examples");

  const int n = static_cast<int>(raw.size());
  const int p = static_cast<int>(feature_cols.size());
  Dataset d;
  d.X.resize(n, p + 1);
  d.X.col(0).setOnes();
  d.y.resize(n);
  d.feature_names.push_back("(Intercept)");
  d.kinds.push_back(FeatureKind::kBinary);
  d.categories.emplace_back();

  for (int k = 0; k < p; ++k) {
    const int c = feature_cols[k];
    const auto it = schema.kinds.find(header[c]);
    const FeatureKind kind = it == schema.kinds.end() ? FeatureKind::kReal : it->second;
    d.feature_names.push_back(header[c]);
    d.kinds.push_back(kind);
    std::vector<std::string> cats;
    if (kind == FeatureKind::kCategorical) {
      std::set<std::string> distinct;
      for (const auto& row : raw) distinct.insert(row[c]);
      cats.assign(distinct.begin(), distinct.end());
    }
    for (int i = 0; i < n; ++i) {
      const std::string& field = raw[i][c];
      if (kind == FeatureKind::kCategorical) {
        d.X(i, k + 1) = static_cast<double>(
            std::lower_bound(cats.begin(), cats.end(), field) - cats.begin());
        continue;
      }
      double v = 0.0;
      if (!parse_double(field, v) || !std::isfinite(v)) {
        throw DataError("malformed value '" + field + "' in column '" + header[c] + "'", i + 1,
                        c + 1);
      }
      if (kind == FeatureKind::kBinary && v != 0.0 && v != 1.0) {
        throw DataError("binary column '" + header[c] + "' holds " + field, i + 1, c + 1);
      }
      d.X(i, k + 1) = v;
    }
    d.categories.push_back(std::move(cats));
  }

  for (int i = 0; i < n; ++i) {
    const std::string& field = raw[i][label_col];
    double v = 0.0;
    if (!parse_double(field, v)) {
      throw DataError("unknown label value '" + field + "'", i + 1, label_col + 1);
    }
    int label = 0;
    if (schema.label_mapping == LabelMapping::kZeroOne) {
      if (v == 0.0) label = -1;
      if (v == 1.0) label = 1;
    } else {
      if (v == -1.0) label = -1;
      if (v == 1.0) label = 1;
    }
    if (label == 0) throw DataError("unknown label value '" + field + "'", i + 1, label_col + 1);
    d.y(i) = label;
  }
  d.finalize();
  return d;
}

void ClassWeights::validate() const {
  if (!(positive > 0.0 && positive < 1.0) || !(negative > 0.0 && negative < 1.0)) {
    throw std::invalid_argument("class weights must lie in (0, 1)");
  }
  if (std::abs(positive + negative - 1.0) > 1e-12) {
    throw std::invalid_argument("class weights must sum to 1");
  }
}

WeightMode parse_weight_mode(const std::string& text) {
  if (text == "unweighted") return WeightMode::kUnweighted;
  if (text == "balanced") return WeightMode::kBalanced;
  if (text == "all-negatives-correct") return WeightMode::kAllNegativesCorrect;
  if (text == "all-positives-correct") return WeightMode::kAllPositivesCorrect;
  if (text == "explicit") return WeightMode::kExplicit;
  throw std::invalid_argument("unknown weight mode '" + text + "'");
}

ClassWeights make_weights(const Dataset& data, WeightMode mode, double explicit_positive) {
  const double np = data.n_positive();
  const double nn = data.n_negative();
  if (mode != WeightMode::kUnweighted && mode != WeightMode::kExplicit && (np < 1 || nn < 1)) {
    throw std::invalid_argument("weighting mode requires examples from both classes");
  }
  double w = 0.5;
  switch (mode) {
    case WeightMode::kUnweighted:
      w = 0.5;
      break;
    case WeightMode::kBalanced:
      w = nn / (np + nn);
      break;
    case WeightMode::kAllNegativesCorrect: {
      // Strictly below 1 / (1 + N+): take half of the admissible interval.
      w = 0.5 / (1.0 + np);
      break;
    }
    case WeightMode::kAllPositivesCorrect: {
      const double lower = nn / (1.0 + nn);
      w = lower + 0.5 * (1.0 - lower);
      break;
    }
    case WeightMode::kExplicit:
      if (!(explicit_positive > 0.0 && explicit_positive < 1.0)) {
        throw std::invalid_argument("explicit positive weight must lie in (0, 1)");
      }
      w = explicit_positive;
      break;
  }
  ClassWeights cw{w, 1.0 - w};
  cw.validate();
  return cw;
}

std::vector<double> adjacent_midpoints(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> mids;
  for (size_t k = 1; k < sorted.size(); ++k) mids.push_back(0.5 * (sorted[k - 1] + sorted[k]));
  return mids;
}

std::pair<Dataset, BinaryRuleSet> binarize(const Dataset& data, const ThresholdPolicy& policy) {
  BinaryRuleSet set;
  set.columns_by_feature.resize(data.p() + 1);
  std::vector<Eigen::VectorXd> columns;

  auto add_rule = [&](BinaryRule rule, Eigen::VectorXd column) {
    columns.push_back(std::move(column));
    set.rules.push_back(std::move(rule));
    set.columns_by_feature[set.rules.back().parent_feature].push_back(
        static_cast<int>(set.rules.size()));
  };
  auto add_with_complement = [&](const BinaryRule& rule, const Eigen::VectorXd& column) {
    add_rule(rule, column);
    if (policy.include_complements) {
      BinaryRule neg = rule;
      neg.complement = true;
      neg.name = "NOT(" + rule.name + ")";
      add_rule(neg, Eigen::VectorXd::Ones(column.size()) - column);
    }
  };

  for (int j = 1; j <= data.p(); ++j) {
    const auto& name = data.feature_names[j];
    const Eigen::VectorXd x = data.X.col(j);
    switch (data.kinds[j]) {
      case FeatureKind::kBinary: {
        BinaryRule r{j, RuleOrigin::kPassthrough, 0.0, -1, false, name};
        add_with_complement(r, x);
        break;
      }
      case FeatureKind::kCategorical: {
        const auto& cats = data.categories[j];
        for (int k = 0; k < static_cast<int>(cats.size()); ++k) {
          BinaryRule r{j, RuleOrigin::kCategoryIndicator, 0.0, k, false, name + "=" + cats[k]};
          Eigen::VectorXd h = (x.array() == static_cast<double>(k)).cast<double>();
          add_with_complement(r, h);
        }
        break;
      }
      case FeatureKind::kReal: {
        std::vector<double> thresholds;
        if (policy.kind == ThresholdPolicyKind::kAllAdjacentMidpoints) {
          thresholds = adjacent_midpoints(std::span<const double>(x.data(), x.size()));
          if (thresholds.empty()) {
            throw DataError("real feature '" + name + "' has a single distinct value");
          }
        } else if (policy.kind == ThresholdPolicyKind::kExplicitList) {
          thresholds = policy.thresholds;
        } else {
          auto it = policy.per_feature.find(name);
          if (it != policy.per_feature.end()) thresholds = it->second;
        }
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
        for (double v : thresholds) {
          BinaryRule r{j, RuleOrigin::kThreshold, v, -1, false, name + ">=" + format_threshold(v)};
          Eigen::VectorXd h = (x.array() >= v).cast<double>();
          add_with_complement(r, h);
        }
        break;
      }
    }
  }

  Dataset out;
  out.X.resize(data.n(), static_cast<Eigen::Index>(columns.size()) + 1);
  out.X.col(0).setOnes();
  for (size_t c = 0; c < columns.size(); ++c) out.X.col(static_cast<Eigen::Index>(c) + 1) = columns[c];
  out.y = data.y;
  out.feature_names.push_back("(Intercept)");
  out.kinds.push_back(FeatureKind::kBinary);
  for (const auto& r : set.rules) {
    out.feature_names.push_back(r.name);
    out.kinds.push_back(FeatureKind::kBinary);
  }
  out.finalize();
  return {std::move(out), std::move(set)};
}

std::vector<std::pair<double, double>> normalize_real_features(Dataset& data) {
  std::vector<std::pair<double, double>> transform(data.p() + 1, {0.0, 1.0});
  for (int j = 1; j <= data.p(); ++j) {
    if (data.kinds[j] != FeatureKind::kReal) continue;
    auto col = data.X.col(j);
    bool integral = true;
    for (int i = 0; i < data.n(); ++i) integral = integral && is_integer_valued(col(i));
    if (integral) continue;
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi <= lo) continue;
    col = (col.array() - lo) / (hi - lo);
    transform[j] = {lo, hi - lo};
  }
  return transform;
}

}  // namespace slimkit
