#include "slimkit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "slimkit/formulation.hpp"
#include "slimkit/heuristics.hpp"

namespace slimkit {

namespace {

using Clock = std::chrono::steady_clock;

int single_column(const PreparedData& prepared, const std::string& name, const std::string& where) {
  const std::vector<int> cols = resolve_feature(prepared, name);
  if (cols.size() != 1) {
    throw ConfigError(where, "'" + name + "' must name exactly one column, it names " +
                                 std::to_string(cols.size()));
  }
  return cols[0];
}

OperationalConstraints resolve_constraints(const PreparedData& prepared, const TrainConfig& c) {
  OperationalConstraints ops;
  ops.max_model_size = c.max_model_size;
  ops.max_fpr = c.max_fpr;
  ops.max_fnr = c.max_fnr;
  ops.max_positive_rate = c.max_positive_rate;
  if (!c.signs.empty()) {
    ops.signs.assign(static_cast<size_t>(prepared.data.p()) + 1, SignConstraint::kFree);
    for (const auto& [name, sign] : c.signs) {
      const std::vector<int> cols = resolve_feature(prepared, name);
      if (cols.empty()) throw ConfigError("constraints.signs." + name, "no such feature");
      for (int col : cols) ops.signs[col] = sign;
    }
  }
  for (const auto& [a, b] : c.either_or) {
    ops.either_or.emplace_back(single_column(prepared, a, "constraints.either_or"),
                               single_column(prepared, b, "constraints.either_or"));
  }
  for (const auto& rule : c.if_then) {
    IfThenConstraint it;
    for (const auto& a : rule.antecedents) it.antecedents.push_back(single_column(prepared, a, "constraints.if_then"));
    it.consequent = single_column(prepared, rule.consequent, "constraints.if_then");
    ops.if_then.push_back(std::move(it));
  }
  for (const auto& [leaf, node] : c.hierarchy) {
    ops.hierarchy.emplace_back(single_column(prepared, leaf, "constraints.hierarchy"),
                               single_column(prepared, node, "constraints.hierarchy"));
  }
  return ops;
}

double relative(double upper, double lower) {
  return (upper - lower) / std::max(std::abs(upper), 1e-10);
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string status_name(const TrainResult& r) { return to_string(r.status); }

// Runs task(0..count-1) on up to `threads` workers, each taking every
// threads-th index so the assignment does not depend on timing.
template <typename Task>
void run_parallel(size_t count, int threads, Task&& task) {
  const size_t workers = std::min(count, static_cast<size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t k = w; k < count; k += workers) task(k);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

Dataset load_training_data(const TrainConfig& config) {
  if (config.data_path.empty()) throw ConfigError("data", "no data file given");
  Schema schema;
  if (!config.schema_path.empty()) schema = read_schema(config.schema_path);
  if (!config.label.empty()) schema.label_column = config.label;
  return load_dataset(config.data_path, schema);
}

PreparedData prepare(const Dataset& raw, const TrainConfig& config) {
  PreparedData out;
  out.source_names = raw.feature_names;
  if (config.family == ModelFamily::kMofN || config.family == ModelFamily::kTilm) {
    auto [rules, set] = binarize(raw, config.thresholds);
    out.rules = describe_rules(raw, set);
    for (int j = 1; j <= raw.p(); ++j) {
      if (!set.columns_by_feature[j].empty()) out.groups.push_back(set.columns_by_feature[j]);
    }
    out.data = std::move(rules);
  } else {
    out.data = raw;
    if (config.normalize) {
      out.transform = normalize_real_features(out.data);
      const bool identity = std::all_of(out.transform.begin(), out.transform.end(),
                                        [](const auto& t) { return t.first == 0.0 && t.second == 1.0; });
      if (identity) out.transform.clear();
    }
  }
  return out;
}

std::vector<int> resolve_feature(const PreparedData& prepared, const std::string& name) {
  const auto& names = prepared.data.feature_names;
  for (int j = 1; j < static_cast<int>(names.size()); ++j) {
    if (names[j] == name) return {j};
  }
  std::vector<int> cols;
  for (size_t r = 0; r < prepared.rules.size(); ++r) {
    if (prepared.rules[r].parent == name) cols.push_back(static_cast<int>(r) + 1);
  }
  return cols;
}

ModelSpec make_spec(const PreparedData& prepared, const Dataset& train, const TrainConfig& c) {
  const int p = train.p();
  const ClassWeights weights = make_weights(train, c.weight_mode, c.positive_weight);
  const double c0 = c.c0_over_np ? *c.c0_over_np / (static_cast<double>(train.n()) * p) : c.c0;
  const OperationalConstraints ops = resolve_constraints(prepared, c);

  InterpretabilitySet L = InterpretabilitySet::uniform(p, c.intercept, c.coefficient);
  for (const auto& [name, set] : c.feature_sets) {
    const std::vector<int> cols = resolve_feature(prepared, name);
    if (cols.empty()) throw ConfigError("coefficients.features." + name, "no such feature");
    for (int col : cols) L[col] = set;
  }
  PenaltyConfig penalty;
  penalty.family = c.family;
  penalty.c0 = c0;
  penalty.l1_tiebreak = c.l1_tiebreak;
  penalty.levels = c.levels;
  penalty.feature_cost = c.feature_cost;
  penalty.rule_cost = c.rule_cost;
  penalty.max_rules_per_feature = c.max_rules_per_feature;
  if (!c.feature_c0.empty()) {
    penalty.c0_per_feature.assign(static_cast<size_t>(p) + 1, c0);
    for (const auto& [name, value] : c.feature_c0) {
      const std::vector<int> cols = resolve_feature(prepared, name);
      if (cols.empty()) throw ConfigError("penalty.features." + name, "no such feature");
      for (int col : cols) penalty.c0_per_feature[col] = value;
    }
  }
  switch (c.family) {
    case ModelFamily::kSlim:
      return make_slim_spec(train, std::move(L), std::move(penalty), weights, ops, c.margin);
    case ModelFamily::kPilm:
      if (c.levels.empty()) throw ConfigError("penalty.levels", "PILM needs at least one level");
      return make_pilm_spec(train, c.intercept, c.levels, weights, ops, c.margin);
    case ModelFamily::kMofN:
      return make_mofn_spec(train, c0, weights, ops, c.margin);
    case ModelFamily::kTilm:
      return make_tilm_spec(train, prepared.groups, std::move(L), std::move(penalty), weights, ops, c.margin);
  }
  throw ConfigError("family", "unsupported model family");
}

TrainResult train_model(const PreparedData& prepared, const Dataset& train, const TrainConfig& config) {
  const auto start = Clock::now();
  TrainResult out;
  out.spec = make_spec(prepared, train, config);
  const ModelSpec& spec = out.spec;
  Eigen::VectorXd lambda;
  double gap = 0.0;
  double bound = 0.0;

  if (config.benders) {
    BendersOptions bo;
    bo.gap_tolerance = config.benders_gap;
    bo.max_iterations = config.benders_max_iterations;
    bo.time_limit = config.time_limit;
    bo.proxy.time_limit = config.time_limit;
    bo.proxy.node_limit = config.node_limit;
    const BendersResult br = benders_solve(train, config.loss, spec, bo);
    out.benders = br.trace;
    if (br.lambda.size() == 0) {
      out.status = SolveStatus::kLimitNoIncumbent;
      out.wall_time = seconds_since(start);
      return out;
    }
    lambda = br.lambda;
    out.status = br.converged ? SolveStatus::kOptimal : SolveStatus::kFeasibleTimeLimit;
    gap = br.converged ? 0.0 : relative(br.upper_bound, br.lower_bound);
    bound = br.lower_bound;
  } else {
    const Dataset* data = &train;
    const ModelSpec* ip_spec = &spec;
    std::optional<Eigen::VectorXd> incumbent;
    if (config.warm_start) incumbent = warm_start(spec, train);
    if (config.reduce) {
      ReductionConfig rc;
      rc.proxy = config.proxy;
      rc.remove_fixed_correct = config.remove_fixed_correct;
      const ReductionProfile profile = reduction_profile(train, spec, rc);
      double width = 0.0;
      if (config.level_set_width) {
        width = *config.level_set_width;
      } else if (config.proxy == ProxyKind::kRelaxation) {
        // Any feasible point bounds the relaxation value of every optimum.
        const Eigen::VectorXd feasible =
            incumbent ? *incumbent : Eigen::VectorXd::Zero(train.p() + 1);
        width = epsilon_from_feasible(evaluate(spec, train, feasible).objective, profile.proxy_objective);
      } else {
        throw ConfigError("reduction.level_set_width", "required for the hinge proxy");
      }
      out.reduction = apply_level_set(profile, train, spec, width, rc.remove_fixed_correct);
      data = &out.reduction->reduced;
      ip_spec = &out.reduction->reduced_spec;
    }
    const IntegerProgram ip = build_program(*data, *ip_spec);
    SolveOptions so;
    so.time_limit = config.time_limit;
    so.gap_tolerance = config.gap_tolerance;
    so.node_limit = config.node_limit;
    so.seed = config.seed;
    so.heuristic_frequency = config.heuristic_frequency;
    if (incumbent) {
      if (auto x = encode_solution(ip, *data, *incumbent)) so.warm_starts.push_back(std::move(*x));
    }
    so.heuristic = make_rounding_heuristic(ip, *data);
    const SolveResult sr = solve(ip, so);
    out.status = sr.status;
    out.nodes = sr.node_count;
    if (!sr.has_incumbent()) {
      out.wall_time = seconds_since(start);
      return out;
    }
    lambda = ip.decode_lambda(sr.x);
    gap = sr.gap;
    bound = sr.dual_bound;
  }

  TrainedModel& m = out.model;
  m.family = config.family;
  m.feature_names = prepared.data.feature_names;
  m.coefficients.assign(lambda.data(), lambda.data() + lambda.size());
  m.rules = prepared.rules;
  m.transform = prepared.transform;
  m.objective = config.benders ? benders_objective(config.loss, spec, train, lambda)
                               : evaluate(spec, train, lambda).objective;
  m.status = status_name(out);
  m.gap = gap;
  m.dual_bound = bound;
  set_training_metrics(m, train, spec.weights);

  const std::vector<std::string> violations = certify(spec.ops, spec.coefficients, train, lambda);
  if (!violations.empty()) {
    std::string what = "trained model fails certification:";
    for (const auto& v : violations) what += " " + v + ";";
    throw std::runtime_error(what);
  }
  out.wall_time = seconds_since(start);
  return out;
}

std::vector<int> stratified_folds(const Dataset& data, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("need at least 2 folds");
  if (folds > data.n()) throw std::invalid_argument("more folds than examples");
  std::mt19937_64 rng(seed);
  std::vector<int> out(static_cast<size_t>(data.n()), 0);
  int next = 0;
  for (const auto* index : {&data.positive_index, &data.negative_index}) {
    std::vector<int> order = *index;
    std::shuffle(order.begin(), order.end(), rng);
    for (int i : order) {
      out[i] = next;
      next = (next + 1) % folds;
    }
  }
  return out;
}

CvResult cross_validate(const PreparedData& prepared, const TrainConfig& config) {
  const Dataset& data = prepared.data;
  const std::vector<int> fold_of = stratified_folds(data, config.folds, config.seed);
  std::vector<std::vector<int>> train_rows(config.folds), test_rows(config.folds);
  for (int i = 0; i < data.n(); ++i) {
    for (int f = 0; f < config.folds; ++f) (fold_of[i] == f ? test_rows : train_rows)[f].push_back(i);
  }
  for (int f = 0; f < config.folds; ++f) {
    const Dataset tr = data.subset(train_rows[f]);
    if (tr.n_positive() == 0 || tr.n_negative() == 0) {
      throw std::runtime_error("fold " + std::to_string(f) + " leaves a class out of its training set");
    }
  }

  CvResult out;
  out.folds.resize(static_cast<size_t>(config.folds));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(config.folds));
  auto run_fold = [&](size_t f) {
    try {
      const Dataset tr = data.subset(train_rows[f]);
      const Dataset te = data.subset(test_rows[f]);
      const TrainResult r = train_model(prepared, tr, config);
      if (!r.has_model()) {
        throw std::runtime_error("fold " + std::to_string(f) + " ended without a model (" +
                                 to_string(r.status) + ")");
      }
      FoldResult& fr = out.folds[f];
      fr.fold = f;
      fr.n_train = tr.n();
      fr.n_test = te.n();
      fr.train_error = r.model.error;
      fr.test_error = classification_metrics(te, r.model.lambda()).error;
      fr.model_size = r.model.model_size;
      fr.status = r.model.status;
      fr.gap = r.model.gap;
      fr.wall_time = r.wall_time;
      fr.coefficients = r.model.coefficients;
    } catch (...) {
      errors[f] = std::current_exception();
    }
  };
  run_parallel(static_cast<size_t>(config.folds), config.threads, run_fold);
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  out.final_model = train_model(prepared, data, config);
  const double k = config.folds;
  std::vector<int> sizes;
  for (const auto& fr : out.folds) {
    out.mean_test_error += fr.test_error / k;
    out.mean_train_error += fr.train_error / k;
    sizes.push_back(fr.model_size);
  }
  double ss = 0.0;
  for (const auto& fr : out.folds) ss += (fr.test_error - out.mean_test_error) * (fr.test_error - out.mean_test_error);
  out.std_test_error = std::sqrt(ss / (k - 1));
  std::sort(sizes.begin(), sizes.end());
  const size_t mid = sizes.size() / 2;
  out.median_model_size = sizes.size() % 2 ? sizes[mid] : 0.5 * (sizes[mid - 1] + sizes[mid]);
  out.min_model_size = sizes.front();
  out.max_model_size = sizes.back();
  return out;
}

std::string CvResult::to_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "fold,n_train,n_test,train_error,test_error,model_size,status,gap,wall_seconds\n";
  for (const auto& f : folds) {
    out << f.fold << "," << f.n_train << "," << f.n_test << "," << f.train_error << "," << f.test_error
        << "," << f.model_size << "," << f.status << "," << f.gap << "," << f.wall_time << "\n";
  }
  if (final_model.has_model()) {
    const auto& m = final_model.model;
    out << "all,,," << m.error << ",," << m.model_size << "," << m.status << "," << m.gap << ","
        << final_model.wall_time << "\n";
  }
  return out.str();
}

std::vector<SweepRow> sweep_regularization(const PreparedData& prepared, const TrainConfig& config,
                                           const std::vector<double>& c0_values) {
  if (c0_values.empty()) return {};
  const Dataset& data = prepared.data;
  std::mt19937_64 rng(config.seed);
  std::vector<int> train_rows, test_rows;
  for (const auto* index : {&data.positive_index, &data.negative_index}) {
    std::vector<int> order = *index;
    std::shuffle(order.begin(), order.end(), rng);
    const size_t held = static_cast<size_t>(std::llround(config.holdout * static_cast<double>(order.size())));
    for (size_t k = 0; k < order.size(); ++k) (k < held ? test_rows : train_rows).push_back(order[k]);
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  const Dataset tr = data.subset(train_rows);
  const Dataset te = data.subset(test_rows);
  std::vector<SweepRow> rows(c0_values.size());
  std::vector<std::exception_ptr> errors(c0_values.size());
  auto run_point = [&](size_t k) {
    try {
      TrainConfig c = config;
      c.c0 = c0_values[k];
      c.c0_over_np.reset();
      const TrainResult r = train_model(prepared, tr, c);
      SweepRow& row = rows[k];
      row.c0 = c0_values[k];
      row.status = to_string(r.status);
      if (r.has_model()) {
        row.train_error = r.model.error;
        row.test_error = te.n() > 0 ? classification_metrics(te, r.model.lambda()).error : 0.0;
        row.model_size = r.model.model_size;
        row.coefficients = r.model.coefficients;
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  run_parallel(c0_values.size(), config.threads, run_point);
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "c0,train_error,test_error,model_size,status\n";
  for (const auto& r : rows) {
    out << r.c0 << "," << r.train_error << "," << r.test_error << "," << r.model_size << "," << r.status << "\n";
  }
  return out.str();
}

}  // namespace slimkit
