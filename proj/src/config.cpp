#include "slimkit/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace slimkit {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void expect_object(const json& doc, const std::string& path, std::set<std::string> allowed) {
  if (!doc.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

template <typename T>
T get(const json& doc, const std::string& path) {
  try {
    return doc.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("wrong type: ") + e.what());
  }
}

template <typename T>
void read(const json& doc, const std::string& path, const std::string& key, T& out) {
  if (doc.contains(key)) out = get<T>(doc.at(key), join(path, key));
}

template <typename T>
void read(const json& doc, const std::string& path, const std::string& key, std::optional<T>& out) {
  if (doc.contains(key) && !doc.at(key).is_null()) out = get<T>(doc.at(key), join(path, key));
}

SignConstraint parse_sign(const std::string& text, const std::string& path) {
  if (text == "positive" || text == "non-negative") return SignConstraint::kNonNegative;
  if (text == "negative" || text == "non-positive") return SignConstraint::kNonPositive;
  if (text == "free") return SignConstraint::kFree;
  throw ConfigError(path, "sign must be positive, negative or free");
}

std::string sign_name(SignConstraint s) {
  switch (s) {
    case SignConstraint::kNonNegative:
      return "positive";
    case SignConstraint::kNonPositive:
      return "negative";
    case SignConstraint::kFree:
      return "free";
  }
  return "free";
}

std::string weight_mode_name(WeightMode mode) {
  switch (mode) {
    case WeightMode::kUnweighted:
      return "unweighted";
    case WeightMode::kBalanced:
      return "balanced";
    case WeightMode::kAllNegativesCorrect:
      return "all-negatives-correct";
    case WeightMode::kAllPositivesCorrect:
      return "all-positives-correct";
    case WeightMode::kExplicit:
      return "explicit";
  }
  return "unweighted";
}

json set_to_json(const CoefficientSet& set) {
  if (set.is_integer_interval()) return json{{"lo", set.min()}, {"hi", set.max()}};
  return json{{"values", set.values()}};
}

void parse_coefficients(const json& doc, const std::string& path, TrainConfig& c) {
  expect_object(doc, path, {"intercept", "default", "features"});
  if (doc.contains("intercept")) c.intercept = parse_coefficient_set(doc["intercept"], join(path, "intercept"));
  if (doc.contains("default")) c.coefficient = parse_coefficient_set(doc["default"], join(path, "default"));
  if (doc.contains("features")) {
    const std::string fp = join(path, "features");
    if (!doc["features"].is_object()) throw ConfigError(fp, "expected an object");
    for (const auto& [name, value] : doc["features"].items()) {
      c.feature_sets[name] = parse_coefficient_set(value, join(fp, name));
    }
  }
}

void parse_penalty(const json& doc, const std::string& path, TrainConfig& c) {
  expect_object(doc, path,
                {"c0", "c0_over_np", "features", "l1_tiebreak", "levels", "feature_cost", "rule_cost",
                 "max_rules_per_feature"});
  read(doc, path, "c0", c.c0);
  read(doc, path, "c0_over_np", c.c0_over_np);
  read(doc, path, "features", c.feature_c0);
  read(doc, path, "l1_tiebreak", c.l1_tiebreak);
  read(doc, path, "feature_cost", c.feature_cost);
  read(doc, path, "rule_cost", c.rule_cost);
  read(doc, path, "max_rules_per_feature", c.max_rules_per_feature);
  if (doc.contains("levels")) {
    const std::string lp = join(path, "levels");
    if (!doc["levels"].is_array()) throw ConfigError(lp, "expected an array");
    int k = 0;
    for (const auto& level : doc["levels"]) {
      const std::string at = lp + "[" + std::to_string(k++) + "]";
      expect_object(level, at, {"values", "cost"});
      PenaltyLevel pl;
      read(level, at, "values", pl.values);
      read(level, at, "cost", pl.cost);
      c.levels.push_back(std::move(pl));
    }
  }
  if (!(c.c0 >= 0.0) || !std::isfinite(c.c0)) throw ConfigError(join(path, "c0"), "must be non-negative");
  if (c.c0_over_np && !(*c.c0_over_np > 0.0)) throw ConfigError(join(path, "c0_over_np"), "must be positive");
}

void parse_constraints(const json& doc, const std::string& path, TrainConfig& c) {
  expect_object(doc, path,
                {"max_model_size", "max_fpr", "max_fnr", "max_positive_rate", "signs", "either_or",
                 "if_then", "hierarchy"});
  read(doc, path, "max_model_size", c.max_model_size);
  read(doc, path, "max_fpr", c.max_fpr);
  read(doc, path, "max_fnr", c.max_fnr);
  read(doc, path, "max_positive_rate", c.max_positive_rate);
  if (doc.contains("signs")) {
    const std::string sp = join(path, "signs");
    if (!doc["signs"].is_object()) throw ConfigError(sp, "expected an object");
    for (const auto& [name, value] : doc["signs"].items()) {
      c.signs[name] = parse_sign(get<std::string>(value, join(sp, name)), join(sp, name));
    }
  }
  read(doc, path, "either_or", c.either_or);
  read(doc, path, "hierarchy", c.hierarchy);
  if (doc.contains("if_then")) {
    const std::string ip = join(path, "if_then");
    if (!doc["if_then"].is_array()) throw ConfigError(ip, "expected an array");
    int k = 0;
    for (const auto& rule : doc["if_then"]) {
      const std::string at = ip + "[" + std::to_string(k++) + "]";
      expect_object(rule, at, {"if", "then"});
      IfThenByName it;
      read(rule, at, "if", it.antecedents);
      read(rule, at, "then", it.consequent);
      c.if_then.push_back(std::move(it));
    }
  }
  if (c.max_model_size && *c.max_model_size < 0) {
    throw ConfigError(join(path, "max_model_size"), "must be non-negative");
  }
  for (const auto& [key, value] : {std::pair{"max_fpr", c.max_fpr}, std::pair{"max_fnr", c.max_fnr},
                                   std::pair{"max_positive_rate", c.max_positive_rate}}) {
    if (value && !(*value >= 0.0 && *value <= 1.0)) throw ConfigError(join(path, key), "must lie in [0, 1]");
  }
}

void parse_binarize(const json& doc, const std::string& path, TrainConfig& c) {
  expect_object(doc, path, {"policy", "thresholds", "per_feature", "complements"});
  std::string policy = "midpoints";
  read(doc, path, "policy", policy);
  if (policy == "midpoints") {
    c.thresholds.kind = ThresholdPolicyKind::kAllAdjacentMidpoints;
  } else if (policy == "list") {
    c.thresholds.kind = ThresholdPolicyKind::kExplicitList;
  } else if (policy == "per-feature") {
    c.thresholds.kind = ThresholdPolicyKind::kDomainSupplied;
  } else {
    throw ConfigError(join(path, "policy"), "must be midpoints, list or per-feature");
  }
  read(doc, path, "thresholds", c.thresholds.thresholds);
  read(doc, path, "per_feature", c.thresholds.per_feature);
  read(doc, path, "complements", c.thresholds.include_complements);
}

void parse_solver(const json& doc, const std::string& path, TrainConfig& c) {
  expect_object(doc, path, {"time_limit", "gap_tolerance", "node_limit", "heuristic_frequency", "warm_start"});
  read(doc, path, "time_limit", c.time_limit);
  read(doc, path, "gap_tolerance", c.gap_tolerance);
  read(doc, path, "node_limit", c.node_limit);
  read(doc, path, "heuristic_frequency", c.heuristic_frequency);
  read(doc, path, "warm_start", c.warm_start);
  if (!(c.time_limit > 0.0)) throw ConfigError(join(path, "time_limit"), "must be positive");
  if (!(c.gap_tolerance >= 0.0)) throw ConfigError(join(path, "gap_tolerance"), "must be non-negative");
}

}  // namespace

CoefficientSet parse_coefficient_set(const json& doc, const std::string& path) {
  try {
    if (doc.is_number_integer()) return CoefficientSet::symmetric(doc.get<int>());
    if (doc.is_string()) {
      if (doc.get<std::string>() == "two-significant-digits") return CoefficientSet::two_significant_digits();
      throw ConfigError(path, "unknown set name '" + doc.get<std::string>() + "'");
    }
    expect_object(doc, path, {"lo", "hi", "values", "two_significant_digits"});
    if (doc.contains("values")) return CoefficientSet(get<std::vector<double>>(doc["values"], join(path, "values")));
    if (doc.contains("two_significant_digits")) {
      return CoefficientSet::two_significant_digits(get<int>(doc["two_significant_digits"], path));
    }
    if (!doc.contains("lo") || !doc.contains("hi")) throw ConfigError(path, "needs lo and hi, or values");
    return CoefficientSet::integer_range(get<int>(doc["lo"], join(path, "lo")), get<int>(doc["hi"], join(path, "hi")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

TrainConfig parse_config(const json& doc) {
  expect_object(doc, "",
                {"family", "data", "schema", "label", "seed", "coefficients", "penalty", "margin",
                 "weights", "constraints", "binarize", "normalize", "solver", "reduction", "benders",
                 "cv", "sweep"});
  TrainConfig c;
  if (doc.contains("family")) {
    try {
      c.family = parse_model_family(get<std::string>(doc["family"], "family"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("family", e.what());
    }
  }
  // M-of-N tables use "x < t" rules as well unless told otherwise.
  c.thresholds.include_complements = c.family == ModelFamily::kMofN;
  read(doc, "", "data", c.data_path);
  read(doc, "", "schema", c.schema_path);
  read(doc, "", "label", c.label);
  read(doc, "", "seed", c.seed);
  read(doc, "", "margin", c.margin);
  read(doc, "", "normalize", c.normalize);
  if (doc.contains("coefficients")) parse_coefficients(doc["coefficients"], "coefficients", c);
  if (doc.contains("penalty")) parse_penalty(doc["penalty"], "penalty", c);
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    expect_object(w, "weights", {"mode", "positive"});
    if (w.contains("mode")) {
      try {
        c.weight_mode = parse_weight_mode(get<std::string>(w["mode"], "weights.mode"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("weights.mode", e.what());
      }
    }
    read(w, "weights", "positive", c.positive_weight);
  }
  if (doc.contains("constraints")) parse_constraints(doc["constraints"], "constraints", c);
  if (doc.contains("binarize")) parse_binarize(doc["binarize"], "binarize", c);
  if (doc.contains("solver")) parse_solver(doc["solver"], "solver", c);
  if (doc.contains("reduction")) {
    const json& r = doc["reduction"];
    expect_object(r, "reduction", {"enabled", "proxy", "level_set_width", "remove_fixed_correct"});
    read(r, "reduction", "enabled", c.reduce);
    read(r, "reduction", "level_set_width", c.level_set_width);
    read(r, "reduction", "remove_fixed_correct", c.remove_fixed_correct);
    if (r.contains("proxy")) {
      try {
        c.proxy = parse_proxy_kind(get<std::string>(r["proxy"], "reduction.proxy"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("reduction.proxy", e.what());
      }
    }
    if (c.level_set_width && !(*c.level_set_width >= 0.0)) {
      throw ConfigError("reduction.level_set_width", "must be non-negative");
    }
  }
  if (doc.contains("benders")) {
    const json& b = doc["benders"];
    expect_object(b, "benders", {"enabled", "loss", "gap_tolerance", "max_iterations"});
    read(b, "benders", "enabled", c.benders);
    read(b, "benders", "gap_tolerance", c.benders_gap);
    read(b, "benders", "max_iterations", c.benders_max_iterations);
    if (b.contains("loss")) {
      try {
        c.loss = parse_loss_kind(get<std::string>(b["loss"], "benders.loss"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("benders.loss", e.what());
      }
    }
  }
  if (doc.contains("cv")) {
    expect_object(doc["cv"], "cv", {"folds", "threads"});
    read(doc["cv"], "cv", "folds", c.folds);
    read(doc["cv"], "cv", "threads", c.threads);
    if (c.folds < 2) throw ConfigError("cv.folds", "must be at least 2");
    if (c.threads < 1) throw ConfigError("cv.threads", "must be at least 1");
  }
  if (doc.contains("sweep")) {
    expect_object(doc["sweep"], "sweep", {"c0", "holdout"});
    read(doc["sweep"], "sweep", "c0", c.sweep_c0);
    read(doc["sweep"], "sweep", "holdout", c.holdout);
    if (!(c.holdout > 0.0 && c.holdout < 1.0)) throw ConfigError("sweep.holdout", "must lie in (0, 1)");
  }
  return c;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const TrainConfig& c) {
  json doc;
  doc["family"] = to_string(c.family);
  doc["data"] = c.data_path;
  doc["schema"] = c.schema_path;
  doc["label"] = c.label;
  doc["seed"] = c.seed;
  doc["margin"] = c.margin;
  doc["normalize"] = c.normalize;
  json features = json::object();
  for (const auto& [name, set] : c.feature_sets) features[name] = set_to_json(set);
  doc["coefficients"] = {{"intercept", set_to_json(c.intercept)},
                         {"default", set_to_json(c.coefficient)},
                         {"features", features}};
  json levels = json::array();
  for (const auto& l : c.levels) levels.push_back({{"values", l.values}, {"cost", l.cost}});
  doc["penalty"] = {{"c0", c.c0},
                    {"features", c.feature_c0},
                    {"l1_tiebreak", c.l1_tiebreak},
                    {"levels", levels},
                    {"feature_cost", c.feature_cost},
                    {"rule_cost", c.rule_cost},
                    {"max_rules_per_feature", c.max_rules_per_feature}};
  if (c.c0_over_np) doc["penalty"]["c0_over_np"] = *c.c0_over_np;
  doc["weights"] = {{"mode", weight_mode_name(c.weight_mode)}, {"positive", c.positive_weight}};
  json cons = json::object();
  if (c.max_model_size) cons["max_model_size"] = *c.max_model_size;
  if (c.max_fpr) cons["max_fpr"] = *c.max_fpr;
  if (c.max_fnr) cons["max_fnr"] = *c.max_fnr;
  if (c.max_positive_rate) cons["max_positive_rate"] = *c.max_positive_rate;
  json signs = json::object();
  for (const auto& [name, s] : c.signs) signs[name] = sign_name(s);
  cons["signs"] = signs;
  cons["either_or"] = c.either_or;
  cons["hierarchy"] = c.hierarchy;
  json if_then = json::array();
  for (const auto& it : c.if_then) if_then.push_back({{"if", it.antecedents}, {"then", it.consequent}});
  cons["if_then"] = if_then;
  doc["constraints"] = cons;
  const char* policy = c.thresholds.kind == ThresholdPolicyKind::kAllAdjacentMidpoints ? "midpoints"
                       : c.thresholds.kind == ThresholdPolicyKind::kExplicitList     ? "list"
                                                                                     : "per-feature";
  doc["binarize"] = {{"policy", policy},
                     {"thresholds", c.thresholds.thresholds},
                     {"per_feature", c.thresholds.per_feature},
                     {"complements", c.thresholds.include_complements}};
  doc["solver"] = {{"time_limit", c.time_limit},
                   {"gap_tolerance", c.gap_tolerance},
                   {"node_limit", c.node_limit},
                   {"heuristic_frequency", c.heuristic_frequency},
                   {"warm_start", c.warm_start}};
  doc["reduction"] = {{"enabled", c.reduce},
                      {"proxy", to_string(c.proxy)},
                      {"remove_fixed_correct", c.remove_fixed_correct}};
  if (c.level_set_width) doc["reduction"]["level_set_width"] = *c.level_set_width;
  doc["benders"] = {{"enabled", c.benders},
                    {"loss", to_string(c.loss)},
                    {"gap_tolerance", c.benders_gap},
                    {"max_iterations", c.benders_max_iterations}};
  doc["cv"] = {{"folds", c.folds}, {"threads", c.threads}};
  doc["sweep"] = {{"c0", c.sweep_c0}, {"holdout", c.holdout}};
  return doc;
}

}  // namespace slimkit
