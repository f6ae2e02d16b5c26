#include "slimkit/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slimkit {

namespace {

constexpr int kPriorityCoefficient = 3;
constexpr int kPrioritySelection = 2;
constexpr int kPriorityIndicator = 1;

std::string indexed(const char* base, int j) { return std::string(base) + "_" + std::to_string(j); }

std::string indexed(const char* base, int j, int k) {
  return indexed(base, j) + "_" + std::to_string(k);
}

void check_coefficient_count(const Dataset& data, const InterpretabilitySet& L) {
  if (L.size() != data.p() + 1) {
    throw std::invalid_argument("interpretability set has " + std::to_string(L.size()) +
                                " components for " + std::to_string(data.p() + 1) +
                                " coefficients");
  }
}

InterpretabilitySet apply_signs(InterpretabilitySet L, const OperationalConstraints& ops) {
  for (int j = 0; j < L.size(); ++j) {
    const SignConstraint sign = ops.sign(j);
    if (sign == SignConstraint::kFree) continue;
    CoefficientSet restricted = L[j].restrict_sign(sign);
    if (restricted.size() == 1 && L[j].size() > 1) {
      throw std::invalid_argument("sign constraint on coefficient " + std::to_string(j) +
                                  " leaves no nonzero admissible value");
    }
    L[j] = std::move(restricted);
  }
  return L;
}

double resolve_margin(const Dataset& data, double margin) {
  return margin > 0.0 ? margin : default_margin(data);
}

// Smallest positive entry, or +inf.
double smallest_positive(std::initializer_list<double> values) {
  double best = std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (v > 0.0) best = std::min(best, v);
  }
  return best;
}

double resolve_l1(double requested, double unit_cost, int n, const InterpretabilitySet& L,
                  const ClassWeights& weights) {
  if (requested >= 0.0) return requested;
  if (L.max_l1_norm() == 0.0) return 0.0;
  return default_l1_tiebreak(unit_cost, n, L, weights);
}

void add_penalty_row(IntegerProgram& ip, int phi, std::vector<std::pair<int, double>> parts,
                     const std::string& name) {
  Constraint c{name, {{phi, 1.0}}, Sense::kEqual, 0.0};
  for (auto [k, a] : parts) {
    if (a != 0.0) c.terms.emplace_back(k, -a);
  }
  ip.add_constraint(std::move(c));
}

// lambda_j, its selectors, alpha_j, beta_j and (except TILM) Phi_j.
void add_coefficient(IntegerProgram& ip, const ModelSpec& spec, int j) {
  const CoefficientSet& S = spec.coefficients[j];
  auto& enc = ip.coefficients[j];
  const bool penalized = j > 0;
  const bool pilm = spec.family == ModelFamily::kPilm && penalized;
  const bool interval = !pilm && S.is_integer_interval();
  const double eps = std::max(spec.penalty.l1_tiebreak, 0.0);

  enc.lambda = ip.add_variable({indexed("lambda", j),
                                interval ? VarKind::kInteger : VarKind::kContinuous, S.min(),
                                S.max(), VarRole::kCoefficient,
                                interval ? kPriorityCoefficient : 0});
  if (penalized) {
    enc.alpha = ip.add_variable({indexed("alpha", j), VarKind::kBinary, 0.0,
                                 S.size() > 1 ? 1.0 : 0.0, VarRole::kSelection,
                                 kPrioritySelection});
  }

  if (!interval) {
    // lambda_j = sum_k l_k u_k; PILM lists zero explicitly and picks exactly
    // one value, otherwise zero is the slack of sum_k u_k <= 1.
    Constraint link{indexed("value", j), {{enc.lambda, 1.0}}, Sense::kEqual, 0.0};
    Constraint pick{indexed("pick", j), {}, Sense::kLessEqual, 1.0};
    Constraint used{indexed("used", j), {}, Sense::kEqual, 0.0};
    if (penalized) used.terms.emplace_back(enc.alpha, 1.0);
    std::vector<std::pair<int, double>> level_costs;
    for (int k = 0; k < S.size(); ++k) {
      const double v = S.values()[k];
      if (v == 0.0 && !pilm) continue;
      const int u = ip.add_variable(
          {indexed("u", j, k), VarKind::kBinary, 0.0, 1.0, VarRole::kLevelSelector,
           kPriorityCoefficient});
      enc.selectors.emplace_back(u, v);
      if (v != 0.0) link.terms.emplace_back(u, -v);
      pick.terms.emplace_back(u, 1.0);
      if (penalized && v != 0.0) used.terms.emplace_back(u, -1.0);
      if (pilm) level_costs.emplace_back(u, spec.penalty.level_cost(v));
    }
    if (pilm) pick.sense = Sense::kEqual;
    ip.add_constraint(std::move(link));
    if (!pick.terms.empty()) ip.add_constraint(std::move(pick));
    if (penalized) ip.add_constraint(std::move(used));
    if (pilm) {
      double top = 0.0;
      for (auto [u, c] : level_costs) top = std::max(top, c);
      enc.phi = ip.add_variable({indexed("phi", j), VarKind::kContinuous, 0.0, top,
                                 VarRole::kPenalty, 0},
                                1.0);
      add_penalty_row(ip, enc.phi, level_costs, indexed("penalty", j));
      return;
    }
  } else if (penalized) {
    ip.add_constraint({indexed("l0_hi", j), {{enc.lambda, 1.0}, {enc.alpha, -S.max()}},
                       Sense::kLessEqual, 0.0});
    ip.add_constraint({indexed("l0_lo", j), {{enc.lambda, 1.0}, {enc.alpha, -S.min()}},
                       Sense::kGreaterEqual, 0.0});
  }
  if (!penalized) return;

  if (eps > 0.0) {
    enc.beta = ip.add_variable(
        {indexed("beta", j), VarKind::kContinuous, 0.0, S.max_abs(), VarRole::kMagnitude, 0});
    if (interval) {
      ip.add_constraint({indexed("l1_hi", j), {{enc.lambda, 1.0}, {enc.beta, -1.0}},
                         Sense::kLessEqual, 0.0});
      ip.add_constraint({indexed("l1_lo", j), {{enc.lambda, 1.0}, {enc.beta, 1.0}},
                         Sense::kGreaterEqual, 0.0});
    } else {
      Constraint mag{indexed("magnitude", j), {{enc.beta, 1.0}}, Sense::kEqual, 0.0};
      for (auto [u, v] : enc.selectors) mag.terms.emplace_back(u, -std::abs(v));
      ip.add_constraint(std::move(mag));
    }
  }
  if (spec.family == ModelFamily::kTilm) return;

  const double c0 = spec.penalty.c0_for(j);
  enc.phi = ip.add_variable({indexed("phi", j), VarKind::kContinuous, 0.0,
                             c0 + eps * S.max_abs(), VarRole::kPenalty, 0},
                            1.0);
  std::vector<std::pair<int, double>> parts{{enc.alpha, c0}};
  if (enc.beta >= 0) parts.emplace_back(enc.beta, eps);
  add_penalty_row(ip, enc.phi, parts, indexed("penalty", j));
}

void add_tilm_groups(IntegerProgram& ip, const ModelSpec& spec) {
  const auto& pen = spec.penalty;
  const double eps = std::max(pen.l1_tiebreak, 0.0);
  for (size_t gi = 0; gi < spec.groups.size(); ++gi) {
    const int g = static_cast<int>(gi);
    TilmGroupEncoding enc;
    enc.columns = spec.groups[gi];
    const int t = static_cast<int>(enc.columns.size());
    enc.nu = ip.add_variable(
        {indexed("nu", g), VarKind::kBinary, 0.0, 1.0, VarRole::kFeatureUse, kPrioritySelection});
    enc.tau = ip.add_variable({indexed("tau", g), VarKind::kContinuous, 0.0,
                               static_cast<double>(std::max(pen.max_rules_per_feature - 1, 0)),
                               VarRole::kRulesPerFeature, 0});
    enc.delta = ip.add_variable({indexed("delta", g), VarKind::kBinary, 0.0, 1.0,
                                 VarRole::kSignAgreement, kPrioritySelection});
    Constraint cover{indexed("feature_use", g), {{enc.nu, static_cast<double>(t)}},
                     Sense::kGreaterEqual, 0.0};
    Constraint tight{indexed("feature_off", g), {{enc.nu, 1.0}}, Sense::kLessEqual, 0.0};
    Constraint count{indexed("extra_rules", g), {{enc.tau, 1.0}, {enc.nu, 1.0}}, Sense::kEqual,
                     0.0};
    double top = pen.feature_cost + pen.rule_cost * std::max(pen.max_rules_per_feature - 1, 0);
    std::vector<std::pair<int, double>> parts{{enc.nu, pen.feature_cost},
                                              {enc.tau, pen.rule_cost}};
    for (int c : enc.columns) {
      const auto& ce = ip.coefficients[c];
      const CoefficientSet& S = spec.coefficients[c];
      cover.terms.emplace_back(ce.alpha, -1.0);
      tight.terms.emplace_back(ce.alpha, -1.0);
      count.terms.emplace_back(ce.alpha, -1.0);
      // delta = 1: all coefficients >= 0; delta = 0: all <= 0.
      ip.add_constraint({indexed("sign_hi", g, c), {{ce.lambda, 1.0}, {enc.delta, -S.max()}},
                         Sense::kLessEqual, 0.0});
      ip.add_constraint({indexed("sign_lo", g, c), {{ce.lambda, 1.0}, {enc.delta, S.min()}},
                         Sense::kGreaterEqual, S.min()});
      if (ce.beta >= 0) {
        parts.emplace_back(ce.beta, eps);
        top += eps * S.max_abs();
      }
    }
    ip.add_constraint(std::move(cover));
    ip.add_constraint(std::move(tight));
    ip.add_constraint(std::move(count));
    enc.phi = ip.add_variable(
        {indexed("phi_group", g), VarKind::kContinuous, 0.0, top, VarRole::kPenalty, 0}, 1.0);
    add_penalty_row(ip, enc.phi, parts, indexed("group_penalty", g));
    ip.tilm_groups.push_back(std::move(enc));
  }
}

IntegerProgram penalty_structure(const ModelSpec& spec) {
  IntegerProgram ip;
  ip.spec = spec;
  ip.coefficients.assign(static_cast<size_t>(spec.coefficients.size()), {});
  for (int j = 0; j < spec.coefficients.size(); ++j) add_coefficient(ip, spec, j);
  if (spec.family == ModelFamily::kTilm) add_tilm_groups(ip, spec);
  return ip;
}

void require_alpha(const IntegerProgram& ip, int j) {
  if (j <= 0 || j >= static_cast<int>(ip.coefficients.size()) || ip.coefficients[j].alpha < 0) {
    throw std::invalid_argument("coefficient " + std::to_string(j) +
                                " has no selection variable");
  }
}

}  // namespace

BigMParameters compute_big_m(const Dataset& data, const InterpretabilitySet& L, double margin) {
  check_coefficient_count(data, L);
  BigMParameters out;
  out.margin = margin;
  out.m.resize(static_cast<size_t>(data.n()));
  for (int i = 0; i < data.n(); ++i) {
    double m = margin;
    for (int j = 0; j <= data.p(); ++j) m += L[j].max_product(-data.y(i) * data.X(i, j));
    out.m[i] = m;
  }
  return out;
}

double default_margin(const Dataset& data) {
  for (int j = 1; j <= data.p(); ++j) {
    for (int i = 0; i < data.n(); ++i) {
      const double v = data.X(i, j);
      if (v != 0.0 && v != 1.0) return 0.1;
    }
  }
  return 0.5;
}

double default_l1_tiebreak(double c0, int n, const InterpretabilitySet& L,
                           const ClassWeights& weights) {
  if (c0 < 0.0) throw std::invalid_argument("C0 must be non-negative");
  if (n <= 0) throw std::invalid_argument("N must be positive");
  const double max_l1 = L.max_l1_norm();
  if (max_l1 <= 0.0) {
    throw std::invalid_argument("every non-intercept coefficient set is {0}; no L1 tiebreak exists");
  }
  const double mistake = std::min(weights.scale(1), weights.scale(-1)) / n;
  const double unit = c0 > 0.0 ? std::min(mistake, c0) : mistake;
  return 0.5 * unit / max_l1;
}

double adjust_penalty_for_missing(double c0, int missing, int n) {
  if (n <= 0) throw std::invalid_argument("N must be positive");
  if (missing < 0 || missing > n) {
    throw std::invalid_argument("missing count " + std::to_string(missing) + " outside [0, " +
                                std::to_string(n) + "]");
  }
  return c0 + static_cast<double>(missing) / n;
}

ModelSpec make_slim_spec(const Dataset& data, InterpretabilitySet L, PenaltyConfig penalty,
                         const ClassWeights& weights, const OperationalConstraints& ops,
                         double margin) {
  check_coefficient_count(data, L);
  weights.validate();
  ops.validate(data.p());
  penalty.family = ModelFamily::kSlim;
  penalty.validate();
  ModelSpec spec;
  spec.family = ModelFamily::kSlim;
  spec.coefficients = apply_signs(std::move(L), ops);
  double unit = penalty.c0 > 0.0 ? penalty.c0 : std::numeric_limits<double>::infinity();
  for (int j = 1; j <= data.p(); ++j) unit = std::min(unit, smallest_positive({penalty.c0_for(j)}));
  if (!std::isfinite(unit)) unit = 0.0;
  penalty.l1_tiebreak = resolve_l1(penalty.l1_tiebreak, unit, data.n(), spec.coefficients, weights);
  spec.penalty = std::move(penalty);
  spec.weights = weights;
  spec.ops = ops;
  spec.margin = resolve_margin(data, margin);
  return spec;
}

ModelSpec make_pilm_spec(const Dataset& data, const CoefficientSet& intercept,
                         std::vector<PenaltyLevel> levels, const ClassWeights& weights,
                         const OperationalConstraints& ops, double margin) {
  weights.validate();
  ops.validate(data.p());
  PenaltyConfig penalty;
  penalty.family = ModelFamily::kPilm;
  penalty.levels = std::move(levels);
  penalty.l1_tiebreak = 0.0;
  penalty.validate();
  std::vector<double> all;
  for (const auto& level : penalty.levels) all.insert(all.end(), level.values.begin(), level.values.end());
  InterpretabilitySet L = InterpretabilitySet::uniform(data.p(), intercept, CoefficientSet(all));
  ModelSpec spec;
  spec.family = ModelFamily::kPilm;
  spec.coefficients = apply_signs(std::move(L), ops);
  spec.penalty = std::move(penalty);
  spec.weights = weights;
  spec.ops = ops;
  spec.margin = resolve_margin(data, margin);
  return spec;
}

ModelSpec make_mofn_spec(const Dataset& rules, double c0, const ClassWeights& weights,
                         const OperationalConstraints& ops, double margin) {
  for (int j = 1; j <= rules.p(); ++j) {
    for (int i = 0; i < rules.n(); ++i) {
      const double v = rules.X(i, j);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("M-of-N models need binary rules; column '" +
                                    rules.feature_names[j] + "' is not binary");
      }
    }
  }
  weights.validate();
  ops.validate(rules.p());
  PenaltyConfig penalty;
  penalty.family = ModelFamily::kMofN;
  penalty.c0 = c0;
  penalty.l1_tiebreak = 0.0;
  penalty.validate();
  InterpretabilitySet L = InterpretabilitySet::uniform(
      rules.p(), CoefficientSet::integer_range(-rules.p(), 0), CoefficientSet::integer_range(0, 1));
  ModelSpec spec;
  spec.family = ModelFamily::kMofN;
  spec.coefficients = apply_signs(std::move(L), ops);
  spec.penalty = std::move(penalty);
  spec.weights = weights;
  spec.ops = ops;
  spec.margin = resolve_margin(rules, margin);
  return spec;
}

ModelSpec make_tilm_spec(const Dataset& rules, std::vector<std::vector<int>> groups,
                         InterpretabilitySet L, PenaltyConfig penalty,
                         const ClassWeights& weights, const OperationalConstraints& ops,
                         double margin) {
  check_coefficient_count(rules, L);
  weights.validate();
  ops.validate(rules.p());
  penalty.family = ModelFamily::kTilm;
  penalty.validate();
  std::vector<int> owner(static_cast<size_t>(rules.p()) + 1, -1);
  for (size_t g = 0; g < groups.size(); ++g) {
    for (int c : groups[g]) {
      if (c < 1 || c > rules.p()) throw std::invalid_argument("rule group references column " + std::to_string(c));
      if (owner[c] >= 0) throw std::invalid_argument("rule column " + std::to_string(c) + " is in two groups");
      owner[c] = static_cast<int>(g);
    }
  }
  for (int c = 1; c <= rules.p(); ++c) {
    if (owner[c] < 0) groups.push_back({c});
  }
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  ModelSpec spec;
  spec.family = ModelFamily::kTilm;
  spec.coefficients = apply_signs(std::move(L), ops);
  double unit = smallest_positive({penalty.feature_cost, penalty.rule_cost});
  if (!std::isfinite(unit)) unit = 0.0;
  penalty.l1_tiebreak = resolve_l1(penalty.l1_tiebreak, unit, rules.n(), spec.coefficients, weights);
  spec.penalty = std::move(penalty);
  spec.weights = weights;
  spec.ops = ops;
  spec.margin = resolve_margin(rules, margin);
  spec.groups = std::move(groups);
  return spec;
}

IntegerProgram build_program(const Dataset& data, const ModelSpec& spec) {
  check_coefficient_count(data, spec.coefficients);
  IntegerProgram ip = penalty_structure(spec);
  const BigMParameters big_m = compute_big_m(data, spec.coefficients, spec.margin);
  ip.big_m = big_m.m;
  ip.loss_vars.resize(static_cast<size_t>(data.n()));
  for (int i = 0; i < data.n(); ++i) {
    const int y = data.y(i);
    ip.loss_vars[i] = ip.add_variable(
        {indexed("psi", i), VarKind::kBinary, 0.0, 1.0, VarRole::kLoss, kPriorityIndicator},
        spec.loss_scale * spec.weights.scale(y) / data.n());
    // M_i psi_i >= margin - y_i lambda^T x_i
    Constraint row{indexed("loss", i), {{ip.loss_vars[i], big_m.m[i]}}, Sense::kGreaterEqual,
                   spec.margin};
    for (int j = 0; j <= data.p(); ++j) {
      const double a = y * data.X(i, j);
      if (a != 0.0) row.terms.emplace_back(ip.coefficients[j].lambda, a);
    }
    ip.add_constraint(std::move(row));
  }
  add_operational_constraints(ip, spec.ops, data);
  return ip;
}

IntegerProgram build_proxy_program(const ModelSpec& spec) {
  IntegerProgram ip = penalty_structure(spec);
  ip.theta = ip.add_variable({"theta", VarKind::kContinuous, 0.0, kInf, VarRole::kProxyLoss, 0}, 1.0);
  if (spec.ops.has_rate_constraints()) {
    throw std::invalid_argument("rate constraints need per-example loss indicators");
  }
  Dataset empty;
  empty.X.resize(0, spec.coefficients.size());
  add_operational_constraints(ip, spec.ops, empty);
  return ip;
}

void add_operational_constraints(IntegerProgram& ip, const OperationalConstraints& ops,
                                 const Dataset& data) {
  if (ops.max_model_size) {
    Constraint c{"model_size", {}, Sense::kLessEqual, static_cast<double>(*ops.max_model_size)};
    for (size_t j = 1; j < ip.coefficients.size(); ++j) {
      if (ip.coefficients[j].alpha >= 0) c.terms.emplace_back(ip.coefficients[j].alpha, 1.0);
    }
    ip.add_constraint(std::move(c));
  }
  for (auto [a, b] : ops.either_or) {
    require_alpha(ip, a);
    require_alpha(ip, b);
    ip.add_constraint({"either_or_" + std::to_string(a) + "_" + std::to_string(b),
                       {{ip.coefficients[a].alpha, 1.0}, {ip.coefficients[b].alpha, 1.0}},
                       Sense::kLessEqual, 1.0});
  }
  for (const auto& rule : ops.if_then) {
    require_alpha(ip, rule.consequent);
    Constraint c{"if_then_" + std::to_string(rule.consequent),
                 {{ip.coefficients[rule.consequent].alpha,
                   -static_cast<double>(rule.antecedents.size())}},
                 Sense::kLessEqual, 0.0};
    for (int a : rule.antecedents) {
      require_alpha(ip, a);
      c.terms.emplace_back(ip.coefficients[a].alpha, 1.0);
    }
    ip.add_constraint(std::move(c));
  }
  for (auto [leaf, node] : ops.hierarchy) {
    require_alpha(ip, leaf);
    require_alpha(ip, node);
    ip.add_constraint({"hierarchy_" + std::to_string(leaf) + "_" + std::to_string(node),
                       {{ip.coefficients[leaf].alpha, 1.0}, {ip.coefficients[node].alpha, -1.0}},
                       Sense::kLessEqual, 0.0});
  }
  if (!ops.has_rate_constraints()) return;
  if (ip.loss_vars.size() != static_cast<size_t>(data.n()) || data.n() == 0) {
    throw std::invalid_argument("rate constraints need per-example loss indicators");
  }
  // psi_i = 1 exactly when example i is a mistake at the optimum, so capping
  // the indicators of one class caps that class's error count.
  auto cap_class = [&](int label, double fraction, const char* name) {
    const auto& rows = label > 0 ? data.positive_index : data.negative_index;
    Constraint c{name, {}, Sense::kLessEqual,
                 static_cast<double>(rate_cap(fraction, static_cast<int>(rows.size())))};
    for (int i : rows) c.terms.emplace_back(ip.loss_vars[i], 1.0);
    ip.add_constraint(std::move(c));
  };
  if (ops.max_fpr) cap_class(-1, *ops.max_fpr, "max_fpr");
  if (ops.max_fnr) cap_class(1, *ops.max_fnr, "max_fnr");
  if (ops.max_positive_rate) {
    if (!ip.spec) throw std::invalid_argument("prediction budget needs a ModelSpec");
    const auto& L = ip.spec->coefficients;
    const double margin = ip.spec->margin;
    ip.prediction_vars.resize(static_cast<size_t>(data.n()));
    Constraint budget{"prediction_budget", {}, Sense::kLessEqual,
                      static_cast<double>(rate_cap(*ops.max_positive_rate, data.n()))};
    for (int i = 0; i < data.n(); ++i) {
      // z_i = 0 forces lambda^T x_i <= -margin (predicted negative).
      double m = margin;
      for (int j = 0; j <= data.p(); ++j) m += L[j].max_product(data.X(i, j));
      const int z = ip.add_variable(
          {indexed("z", i), VarKind::kBinary, 0.0, 1.0, VarRole::kPrediction, kPriorityIndicator});
      ip.prediction_vars[i] = z;
      Constraint row{indexed("predict", i), {{z, m}}, Sense::kGreaterEqual, margin};
      for (int j = 0; j <= data.p(); ++j) {
        if (data.X(i, j) != 0.0) row.terms.emplace_back(ip.coefficients[j].lambda, -data.X(i, j));
      }
      ip.add_constraint(std::move(row));
      budget.terms.emplace_back(z, 1.0);
    }
    ip.add_constraint(std::move(budget));
  }
}

std::optional<std::vector<double>> encode_solution(const IntegerProgram& ip, const Dataset& data,
                                                   const Eigen::VectorXd& lambda) {
  if (!ip.spec) throw std::invalid_argument("program carries no ModelSpec");
  const ModelSpec& spec = *ip.spec;
  if (lambda.size() != static_cast<Eigen::Index>(ip.coefficients.size())) return std::nullopt;
  if (!spec.coefficients.contains(lambda)) return std::nullopt;
  std::vector<double> x(static_cast<size_t>(ip.num_variables()), 0.0);
  const double eps = std::max(spec.penalty.l1_tiebreak, 0.0);
  for (size_t j = 0; j < ip.coefficients.size(); ++j) {
    const auto& enc = ip.coefficients[j];
    const double v = lambda(static_cast<Eigen::Index>(j));
    x[enc.lambda] = v;
    for (auto [u, value] : enc.selectors) x[u] = value == v ? 1.0 : 0.0;
    if (enc.alpha >= 0) x[enc.alpha] = v != 0.0 ? 1.0 : 0.0;
    if (enc.beta >= 0) x[enc.beta] = std::abs(v);
    if (enc.phi >= 0) {
      x[enc.phi] = spec.family == ModelFamily::kPilm
                       ? spec.penalty.level_cost(v)
                       : (v != 0.0 ? spec.penalty.c0_for(static_cast<int>(j)) : 0.0) +
                             (enc.beta >= 0 ? eps * std::abs(v) : 0.0);
    }
  }
  for (const auto& g : ip.tilm_groups) {
    int used = 0;
    bool negative = false;
    double l1 = 0.0;
    for (int c : g.columns) {
      used += lambda(c) != 0.0;
      negative = negative || lambda(c) < 0.0;
      if (ip.coefficients[c].beta >= 0) l1 += eps * std::abs(lambda(c));
    }
    x[g.nu] = used > 0 ? 1.0 : 0.0;
    x[g.tau] = used > 0 ? used - 1.0 : 0.0;
    x[g.delta] = negative ? 0.0 : 1.0;
    x[g.phi] = (used > 0 ? spec.penalty.feature_cost + spec.penalty.rule_cost * (used - 1) : 0.0) + l1;
  }
  if (!ip.loss_vars.empty() || !ip.prediction_vars.empty()) {
    const Eigen::VectorXd scores = data.X * lambda;
    for (size_t i = 0; i < ip.loss_vars.size(); ++i) {
      x[ip.loss_vars[i]] = is_error(scores(i), data.y(i), spec.margin) ? 1.0 : 0.0;
    }
    for (size_t i = 0; i < ip.prediction_vars.size(); ++i) {
      x[ip.prediction_vars[i]] = scores(i) > -spec.margin ? 1.0 : 0.0;
    }
  }
  if (ip.theta >= 0) {
    // Smallest theta satisfying every cut theta + a^T x >= rhs.
    double theta = std::max(ip.variable(ip.theta).lower, 0.0);
    for (const auto& c : ip.constraints()) {
      double coef = 0.0;
      double rest = 0.0;
      for (auto [k, a] : c.terms) {
        if (k == ip.theta) {
          coef += a;
        } else {
          rest += a * x[k];
        }
      }
      if (coef > 0.0 && c.sense == Sense::kGreaterEqual) theta = std::max(theta, (c.rhs - rest) / coef);
    }
    x[ip.theta] = theta;
  }
  if (!ip.is_feasible(x, 1e-7)) return std::nullopt;
  return x;
}

std::optional<std::string> zero_model_obstruction(const ModelSpec& spec, const Dataset& data) {
  const Evaluation e = evaluate(spec, data, Eigen::VectorXd::Zero(spec.coefficients.size()));
  if (e.feasible) return std::nullopt;
  return e.violation;
}

}  // namespace slimkit
