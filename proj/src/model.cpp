#include "slimkit/model.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace slimkit {

namespace {

using nlohmann::json;

std::string number(double v) {
  std::ostringstream out;
  if (v == std::round(v) && std::abs(v) < 1e15) {
    out << static_cast<long long>(v);
  } else {
    out << std::setprecision(6) << v;
  }
  return out.str();
}

std::string origin_name(RuleOrigin o) {
  switch (o) {
    case RuleOrigin::kPassthrough:
      return "passthrough";
    case RuleOrigin::kCategoryIndicator:
      return "category";
    case RuleOrigin::kThreshold:
      return "threshold";
  }
  return "passthrough";
}

RuleOrigin parse_origin(const std::string& text) {
  if (text == "passthrough") return RuleOrigin::kPassthrough;
  if (text == "category") return RuleOrigin::kCategoryIndicator;
  if (text == "threshold") return RuleOrigin::kThreshold;
  throw std::invalid_argument("unknown rule origin '" + text + "'");
}

// Non-finite doubles have no JSON literal: infinities are written as "inf" or
// "-inf", NaN as null.
json encode_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}
double read_double(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("malformed model document: '" + s + "' is not a number");
  }
  return v.get<double>();
}

std::string rule_text(const RuleInfo& r) {
  switch (r.origin) {
    case RuleOrigin::kThreshold:
      return r.parent + (r.complement ? " < " : " >= ") + number(r.threshold);
    case RuleOrigin::kCategoryIndicator:
      return r.parent + (r.complement ? " != " : " = ") + r.category;
    case RuleOrigin::kPassthrough:
      return r.complement ? "NOT " + r.parent : r.parent;
  }
  return r.name;
}

struct Row {
  std::string text;
  double value = 0.0;
};

// Nonzero coefficients as rows; category indicators of one feature sharing a
// coefficient collapse into "feature in {a, b}".
std::vector<Row> coefficient_rows(const TrainedModel& m) {
  std::vector<Row> rows;
  std::map<std::pair<std::string, double>, size_t> merged;
  std::map<size_t, std::vector<std::string>> members;
  for (size_t j = 1; j < m.coefficients.size(); ++j) {
    const double v = m.coefficients[j];
    if (v == 0.0) continue;
    if (j - 1 < m.rules.size()) {
      const RuleInfo& r = m.rules[j - 1];
      if (r.origin == RuleOrigin::kCategoryIndicator && !r.complement) {
        const auto key = std::make_pair(r.parent, v);
        auto it = merged.find(key);
        if (it == merged.end()) {
          merged[key] = rows.size();
          members[rows.size()].push_back(r.category);
          rows.push_back({rule_text(r), v});
        } else {
          members[it->second].push_back(r.category);
          std::string set;
          for (const auto& c : members[it->second]) set += (set.empty() ? "" : ", ") + c;
          rows[it->second].text = r.parent + " in {" + set + "}";
        }
        continue;
      }
      rows.push_back({rule_text(r), v});
    } else {
      rows.push_back({m.feature_names[j], v});
    }
  }
  return rows;
}

std::string transform_notes(const TrainedModel& m) {
  std::ostringstream out;
  for (size_t j = 1; j < m.transform.size() && j < m.coefficients.size(); ++j) {
    const auto [offset, scale] = m.transform[j];
    if (m.coefficients[j] == 0.0 || (offset == 0.0 && scale == 1.0)) continue;
    out << "NOTE: " << m.feature_names[j] << " enters as (x - " << number(offset) << ") / "
        << number(scale) << "\n";
  }
  return out.str();
}

std::string render_scoring_table(const TrainedModel& m) {
  const double threshold = -m.coefficients.at(0);
  const std::vector<Row> rows = coefficient_rows(m);
  std::ostringstream out;
  if (rows.empty()) {
    out << "NO FEATURES: SCORE = 0 FOR EVERY EXAMPLE\n";
    out << "PREDICT +1 IF SCORE > " << number(threshold) << ", SO EVERY EXAMPLE IS PREDICTED "
        << (0.0 > threshold ? "+1" : "-1") << "\n";
    return out.str();
  }
  size_t width = 7;
  for (const auto& r : rows) width = std::max(width, r.text.size());
  out << "PREDICT +1 IF SCORE > " << number(threshold) << "\n";
  const std::string rule(width + 18, '=');
  out << rule << "\n";
  for (size_t k = 0; k < rows.size(); ++k) {
    out << std::setw(3) << k + 1 << ". " << std::left << std::setw(static_cast<int>(width)) << rows[k].text
        << std::right << "  \xC3\x97 " << std::setw(6) << number(rows[k].value) << "\n";
  }
  out << rule << "\n";
  out << "ADD POINTS FROM ROWS 1 TO " << rows.size() << " = SCORE\n";
  out << transform_notes(m);
  return out.str();
}

std::string render_mofn(const TrainedModel& m) {
  for (size_t j = 1; j < m.coefficients.size(); ++j) {
    if (m.coefficients[j] != 0.0 && m.coefficients[j] != 1.0) {
      throw std::invalid_argument("an M-of-N table needs 0/1 rule weights");
    }
  }
  const std::vector<Row> rows = coefficient_rows(m);
  const long long big_m = static_cast<long long>(std::llround(1.0 - m.coefficients.at(0)));
  std::ostringstream out;
  if (big_m <= 0) {
    out << "PREDICT +1 FOR EVERY EXAMPLE (AT LEAST " << big_m << " RULES REQUIRED)\n";
  } else if (big_m > static_cast<long long>(rows.size())) {
    out << "PREDICT -1 FOR EVERY EXAMPLE (" << big_m << " RULES REQUIRED, " << rows.size()
        << " AVAILABLE)\n";
  } else {
    out << "PREDICT +1 IF AT LEAST " << big_m << " OF THE FOLLOWING " << rows.size()
        << " RULES ARE TRUE\n";
  }
  size_t width = 10;
  for (const auto& r : rows) width = std::max(width, r.text.size());
  const std::string rule(width + 6, '=');
  out << rule << "\n";
  for (size_t k = 0; k < rows.size(); ++k) out << std::setw(3) << k + 1 << ". " << rows[k].text << "\n";
  out << rule << "\n";
  return out.str();
}

std::string render_score_function(const TrainedModel& m) {
  std::ostringstream out;
  out << "SCORE = " << number(m.coefficients.at(0));
  for (const auto& r : coefficient_rows(m)) {
    out << (r.value < 0 ? " - " : " + ") << number(std::abs(r.value)) << " * [" << r.text << "]";
  }
  out << "\nPREDICT +1 IF SCORE > 0\n" << transform_notes(m);
  return out.str();
}

}  // namespace

void set_training_metrics(TrainedModel& model, const Dataset& data, const ClassWeights& weights) {
  const Eigen::VectorXd lambda = model.lambda();
  const ClassificationMetrics cm = classification_metrics(data, lambda, weights);
  model.model_size = slimkit::model_size(lambda);
  model.error = cm.error;
  model.weighted_error = cm.weighted_error;
  model.tpr = cm.tpr;
  model.fpr = cm.fpr;
}

std::vector<RuleInfo> describe_rules(const Dataset& source, const BinaryRuleSet& rules) {
  std::vector<RuleInfo> out;
  for (const auto& r : rules.rules) {
    RuleInfo info;
    info.name = r.name;
    info.parent = source.feature_names.at(r.parent_feature);
    info.origin = r.origin;
    info.threshold = r.threshold;
    if (r.origin == RuleOrigin::kCategoryIndicator) {
      info.category = source.categories.at(r.parent_feature).at(r.category);
    }
    info.complement = r.complement;
    out.push_back(std::move(info));
  }
  return out;
}

json to_json(const TrainedModel& m) {
  json rules = json::array();
  for (const auto& r : m.rules) {
    rules.push_back({{"name", r.name},
                     {"parent", r.parent},
                     {"origin", origin_name(r.origin)},
                     {"threshold", r.threshold},
                     {"category", r.category},
                     {"complement", r.complement}});
  }
  json transform = json::array();
  for (const auto& [offset, scale] : m.transform) transform.push_back({offset, scale});
  return json{{"family", to_string(m.family)},
              {"feature_names", m.feature_names},
              {"coefficients", m.coefficients},
              {"rules", rules},
              {"transform", transform},
              {"model_size", m.model_size},
              {"objective", encode_double(m.objective)},
              {"training",
               {{"error", m.error}, {"weighted_error", m.weighted_error}, {"tpr", m.tpr}, {"fpr", m.fpr}}},
              {"solve",
               {{"status", m.status},
                {"gap", encode_double(m.gap)},
                {"dual_bound", encode_double(m.dual_bound)}}}};
}

TrainedModel model_from_json(const json& doc) {
  TrainedModel m;
  try {
    m.family = parse_model_family(doc.at("family").get<std::string>());
    m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    m.coefficients = doc.at("coefficients").get<std::vector<double>>();
    for (const auto& r : doc.at("rules")) {
      RuleInfo info;
      info.name = r.at("name").get<std::string>();
      info.parent = r.at("parent").get<std::string>();
      info.origin = parse_origin(r.at("origin").get<std::string>());
      info.threshold = r.at("threshold").get<double>();
      info.category = r.at("category").get<std::string>();
      info.complement = r.at("complement").get<bool>();
      m.rules.push_back(std::move(info));
    }
    for (const auto& t : doc.at("transform")) m.transform.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
    m.model_size = doc.at("model_size").get<int>();
    m.objective = read_double(doc.at("objective"));
    const json& tr = doc.at("training");
    m.error = tr.at("error").get<double>();
    m.weighted_error = tr.at("weighted_error").get<double>();
    m.tpr = tr.at("tpr").get<double>();
    m.fpr = tr.at("fpr").get<double>();
    const json& so = doc.at("solve");
    m.status = so.at("status").get<std::string>();
    m.gap = read_double(so.at("gap"));
    m.dual_bound = read_double(so.at("dual_bound"));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed model document: ") + e.what());
  }
  if (m.coefficients.size() != m.feature_names.size() || m.coefficients.empty()) {
    throw std::invalid_argument("malformed model document: coefficient and feature counts differ");
  }
  return m;
}

RenderFormat parse_render_format(const std::string& text) {
  if (text == "scoring-table") return RenderFormat::kScoringTable;
  if (text == "mofn-table") return RenderFormat::kMofNTable;
  if (text == "score-function") return RenderFormat::kScoreFunction;
  if (text == "machine-readable" || text == "json") return RenderFormat::kMachineReadable;
  throw std::invalid_argument("unknown render format '" + text + "'");
}

std::string render(const TrainedModel& model, RenderFormat format) {
  switch (format) {
    case RenderFormat::kScoringTable:
      return render_scoring_table(model);
    case RenderFormat::kMofNTable:
      return render_mofn(model);
    case RenderFormat::kScoreFunction:
      return render_score_function(model);
    case RenderFormat::kMachineReadable:
      return to_json(model).dump(2) + "\n";
  }
  return {};
}

std::vector<std::string> certify(const OperationalConstraints& ops, const InterpretabilitySet& sets,
                                 const Dataset& data, const Eigen::VectorXd& lambda) {
  std::vector<std::string> out;
  if (lambda.size() != data.p() + 1) {
    out.push_back("coefficient vector does not match the data");
    return out;
  }
  auto name = [&](int j) { return data.feature_names[j]; };
  for (int j = 0; j <= data.p(); ++j) {
    if (j < sets.size() && !sets[j].contains(lambda(j))) out.push_back(name(j) + " outside its admissible set");
    if (static_cast<size_t>(j) < ops.signs.size()) {
      if (ops.signs[j] == SignConstraint::kNonNegative && lambda(j) < 0.0) out.push_back(name(j) + " is negative");
      if (ops.signs[j] == SignConstraint::kNonPositive && lambda(j) > 0.0) out.push_back(name(j) + " is positive");
    }
  }
  int size = 0;
  for (int j = 1; j <= data.p(); ++j) size += lambda(j) != 0.0;
  if (ops.max_model_size && size > *ops.max_model_size) {
    out.push_back("model size " + std::to_string(size) + " above " + std::to_string(*ops.max_model_size));
  }
  for (auto [a, b] : ops.either_or) {
    if (lambda(a) != 0.0 && lambda(b) != 0.0) out.push_back("both " + name(a) + " and " + name(b) + " used");
  }
  for (const auto& rule : ops.if_then) {
    for (int a : rule.antecedents) {
      if (lambda(a) != 0.0 && lambda(rule.consequent) == 0.0) {
        out.push_back(name(a) + " used without " + name(rule.consequent));
      }
    }
  }
  for (auto [leaf, node] : ops.hierarchy) {
    if (lambda(leaf) != 0.0 && lambda(node) == 0.0) out.push_back(name(leaf) + " used without " + name(node));
  }
  int fp = 0, fn = 0, predicted = 0;
  for (int i = 0; i < data.n(); ++i) {
    double score = 0.0;
    for (int j = 0; j <= data.p(); ++j) score += lambda(j) * data.X(i, j);
    const bool positive = score > 0.0;
    predicted += positive;
    if (data.y(i) < 0) fp += positive;
    if (data.y(i) > 0) fn += !positive;
  }
  auto rate = [](int count, int total) { return total > 0 ? static_cast<double>(count) / total : 0.0; };
  if (ops.max_fpr && fp > rate_cap(*ops.max_fpr, data.n_negative())) {
    out.push_back("false positive rate " + number(rate(fp, data.n_negative())) + " above " + number(*ops.max_fpr));
  }
  if (ops.max_fnr && fn > rate_cap(*ops.max_fnr, data.n_positive())) {
    out.push_back("false negative rate " + number(rate(fn, data.n_positive())) + " above " + number(*ops.max_fnr));
  }
  if (ops.max_positive_rate && predicted > rate_cap(*ops.max_positive_rate, data.n())) {
    out.push_back("positive prediction rate " + number(rate(predicted, data.n())) + " above " +
                  number(*ops.max_positive_rate));
  }
  return out;
}

}  // namespace slimkit
