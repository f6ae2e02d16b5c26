#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slimkit/bounds.hpp"
#include "slimkit/config.hpp"
#include "slimkit/heuristics.hpp"
#include "slimkit/model.hpp"
#include "slimkit/pipeline.hpp"
#include "slimkit/reduction.hpp"

namespace fs = std::filesystem;
using namespace slimkit;

namespace {

enum ExitCode { kSuccess = 0, kFailure = 1, kConfigError = 2, kInfeasible = 3, kNoIncumbent = 4 };

struct SharedFlags {
  std::string config;
  std::string data;
  std::string schema;
  std::string label;
  std::string family;
  std::optional<std::uint64_t> seed;
  std::optional<double> time_limit;
  std::optional<double> c0;
  std::optional<int> threads;
  std::string out_dir = ".";
};

void add_shared(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--data", f.data, "CSV data file (overrides the config)");
  cmd->add_option("--schema", f.schema, "schema file (overrides the config)");
  cmd->add_option("--label", f.label, "label column (overrides the schema)");
  cmd->add_option("--family", f.family, "slim, pilm, mofn or tilm");
  cmd->add_option("--seed", f.seed, "seed for every random choice");
  cmd->add_option("--time-limit", f.time_limit, "solver time limit in seconds");
  cmd->add_option("--c0", f.c0, "sparsity penalty per nonzero coefficient");
  cmd->add_option("--threads", f.threads, "concurrent solves");
  cmd->add_option("--out-dir", f.out_dir, "directory for output files");
}

TrainConfig resolve(const SharedFlags& f) {
  TrainConfig c = f.config.empty() ? TrainConfig{} : load_config(f.config);
  if (!f.data.empty()) c.data_path = f.data;
  if (!f.schema.empty()) c.schema_path = f.schema;
  if (!f.label.empty()) c.label = f.label;
  if (!f.family.empty()) {
    try {
      c.family = parse_model_family(f.family);
    } catch (const std::exception& e) {
      throw ConfigError("family", e.what());
    }
  }
  if (f.seed) c.seed = *f.seed;
  if (f.time_limit) c.time_limit = *f.time_limit;
  if (f.c0) {
    c.c0 = *f.c0;
    c.c0_over_np.reset();
  }
  if (f.threads) c.threads = *f.threads;
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  std::cout << "wrote " << path.string() << "\n";
}

RenderFormat default_format(ModelFamily family) {
  return family == ModelFamily::kMofN ? RenderFormat::kMofNTable : RenderFormat::kScoringTable;
}

std::string metrics_csv(const TrainResult& r) {
  std::ostringstream out;
  out.precision(10);
  const TrainedModel& m = r.model;
  out << "status,objective,error,weighted_error,tpr,fpr,model_size,gap,dual_bound,nodes,wall_seconds\n";
  out << to_string(r.status) << "," << m.objective << "," << m.error << "," << m.weighted_error << ","
      << m.tpr << "," << m.fpr << "," << m.model_size << "," << m.gap << "," << m.dual_bound << ","
      << r.nodes << "," << r.wall_time << "\n";
  return out.str();
}

int status_exit(SolveStatus status) {
  switch (status) {
    case SolveStatus::kInfeasible: return kInfeasible;
    case SolveStatus::kLimitNoIncumbent: return kNoIncumbent;
    case SolveStatus::kUnbounded: return kFailure;
    default: return kSuccess;
  }
}

int run_train(const SharedFlags& f) {
  const TrainConfig c = resolve(f);
  const PreparedData prepared = prepare(load_training_data(c), c);
  const TrainResult r = train_model(prepared, prepared.data, c);
  const fs::path dir = f.out_dir;
  if (r.reduction) write_file(dir / "reduction.csv", r.reduction->to_csv(prepared.data));
  if (r.benders) write_file(dir / "benders_trace.csv", r.benders->to_csv());
  if (!r.has_model()) {
    std::cerr << "no model: " << to_string(r.status) << "\n";
    return status_exit(r.status);
  }
  write_file(dir / "model.json", to_json(r.model).dump(2) + "\n");
  write_file(dir / "metrics.csv", metrics_csv(r));
  std::cout << render(r.model, default_format(c.family));
  return kSuccess;
}

int run_cv(const SharedFlags& f, std::optional<int> folds) {
  TrainConfig c = resolve(f);
  if (folds) c.folds = *folds;
  const PreparedData prepared = prepare(load_training_data(c), c);
  const CvResult cv = cross_validate(prepared, c);
  const fs::path dir = f.out_dir;
  write_file(dir / "cv_metrics.csv", cv.to_csv());
  std::printf("test error %.4f +- %.4f, train error %.4f, model size median %.1f [%d, %d]\n",
              cv.mean_test_error, cv.std_test_error, cv.mean_train_error, cv.median_model_size,
              cv.min_model_size, cv.max_model_size);
  if (!cv.final_model.has_model()) return status_exit(cv.final_model.status);
  write_file(dir / "model.json", to_json(cv.final_model.model).dump(2) + "\n");
  std::cout << render(cv.final_model.model, default_format(c.family));
  return kSuccess;
}

int run_sweep(const SharedFlags& f, std::vector<double> values, int points) {
  const TrainConfig c = resolve(f);
  const PreparedData prepared = prepare(load_training_data(c), c);
  if (values.empty()) values = c.sweep_c0;
  if (values.empty() && points > 0) {
    // log-spaced over the range where C0 changes the optimum
    const double n = prepared.data.n();
    const double lo = 1.0 / (n * prepared.data.p());
    const double hi = 1.0 - 1.0 / n;
    for (int k = 0; k < points; ++k) {
      const double t = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
      values.push_back(lo * std::pow(hi / lo, t));
    }
  }
  const std::vector<SweepRow> rows = sweep_regularization(prepared, c, values);
  write_file(fs::path(f.out_dir) / "path.csv", sweep_csv(rows));
  return kSuccess;
}

int run_reduce(const SharedFlags& f, std::optional<double> width, const std::string& proxy,
               bool remove_correct) {
  TrainConfig c = resolve(f);
  if (!proxy.empty()) {
    try {
      c.proxy = parse_proxy_kind(proxy);
    } catch (const std::exception& e) {
      throw ConfigError("reduction.proxy", e.what());
    }
  }
  if (width) c.level_set_width = width;
  if (remove_correct) c.remove_fixed_correct = true;
  const PreparedData prepared = prepare(load_training_data(c), c);
  const ModelSpec spec = make_spec(prepared, prepared.data, c);
  ReductionConfig rc;
  rc.proxy = c.proxy;
  rc.remove_fixed_correct = c.remove_fixed_correct;
  const ReductionProfile profile = reduction_profile(prepared.data, spec, rc);
  double eps = 0.0;
  if (c.level_set_width) {
    eps = *c.level_set_width;
  } else if (c.proxy == ProxyKind::kRelaxation) {
    const Eigen::VectorXd start = warm_start(spec, prepared.data);
    eps = epsilon_from_feasible(evaluate(spec, prepared.data, start).objective, profile.proxy_objective);
  } else {
    throw ConfigError("reduction.level_set_width", "required for the hinge proxy");
  }
  const ReductionResult r = apply_level_set(profile, prepared.data, spec, eps, rc.remove_fixed_correct);
  write_file(fs::path(f.out_dir) / "reduction.csv", r.to_csv(prepared.data));
  std::printf("proxy objective %.6g, level-set width %.6g: removed %zu of %d examples\n",
              r.proxy_objective, r.level_set_width, r.removed.size(), prepared.data.n());
  return kSuccess;
}

struct BoundsFlags {
  std::vector<int> ps{1, 2, 3, 4, 5};
  std::vector<long long> lambdas{1, 2, 5, 10, 20, 50, 100};
  double delta = 0.01;
  long long n = 1000;
  std::vector<double> rho;
  int k = 1;
};

int run_bounds(const SharedFlags& f, const BoundsFlags& b) {
  const fs::path dir = f.out_dir;
  write_file(dir / "density.csv", density_csv(b.ps, b.lambdas, b.delta, b.n));
  const bool have_data = !f.data.empty() || !f.config.empty();
  if (!have_data) return kSuccess;
  TrainConfig c = resolve(f);
  c.normalize = false;
  const Dataset data = load_training_data(c);
  Eigen::VectorXd rho;
  if (b.rho.empty()) {
    // direction of an unconstrained logistic fit, intercept dropped
    const Eigen::VectorXd w = logistic_regression(data, ClassWeights{});
    rho = w.tail(data.p());
  } else {
    if (static_cast<int>(b.rho.size()) != data.p()) {
      throw ConfigError("rho", "needs one entry per feature (" + std::to_string(data.p()) + ")");
    }
    rho = Eigen::Map<const Eigen::VectorXd>(b.rho.data(), static_cast<Eigen::Index>(b.rho.size()));
  }
  const ResolutionBound rb = kth_margin_lambda(rho, data, b.k);
  std::cout << "resolution bound for the " << data.p()
            << " non-intercept coefficients (the intercept is not part of the bound):\n";
  if (rb.zero_margin) {
    std::cout << "  margin is zero: no finite resolution preserves every sign\n";
  } else {
    const Eigen::VectorXd rounded = round_to_grid(rho, rb.lambda);
    std::printf("  gamma %.6g, x_max %.6g, bound %.6g, Lambda %lld%s\n", rb.gamma, rb.x_max, rb.bound,
                rb.lambda, rb.degenerate ? " (degenerate)" : "");
    std::printf("  mistakes with rho %d, after rounding %d\n", zero_one_mistakes(rho, data),
                zero_one_mistakes(rounded, data));
  }
  return kSuccess;
}

int run_render(const std::string& model_path, const std::string& format) {
  std::ifstream in(model_path);
  if (!in) throw ConfigError("model", "cannot open " + model_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model", e.what());
  }
  const TrainedModel m = model_from_json(doc);
  const RenderFormat fmt = format.empty() ? default_format(m.family) : parse_render_format(format);
  std::cout << render(m, fmt);
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train and inspect sparse integer linear classifiers"};
  app.require_subcommand(1);

  SharedFlags shared;
  auto* train = app.add_subcommand("train", "train one model on all the data");
  add_shared(train, shared);

  std::optional<int> folds;
  auto* cv = app.add_subcommand("cv", "stratified cross-validation plus a final full-data model");
  add_shared(cv, shared);
  cv->add_option("--folds", folds, "number of folds")->check(CLI::Range(2, 1 << 30));

  std::vector<double> c0_values;
  int points = 0;
  auto* sweep = app.add_subcommand("sweep", "train over a list of C0 values on a holdout split");
  add_shared(sweep, shared);
  sweep->add_option("--c0-values", c0_values, "C0 values")->delimiter(',');
  sweep->add_option("--points", points, "log-spaced C0 values over [1/(NP), 1-1/N]");

  std::optional<double> width;
  std::string proxy;
  bool remove_correct = false;
  auto* red = app.add_subcommand("reduce", "report which examples a level set lets us drop");
  add_shared(red, shared);
  red->add_option("--width", width, "level-set width epsilon");
  red->add_option("--proxy", proxy, "relaxation or hinge");
  red->add_flag("--remove-fixed-correct", remove_correct, "also drop examples fixed as correct");

  BoundsFlags bf;
  auto* bounds = app.add_subcommand("bounds", "hypothesis counts, generalization gaps and resolution bounds");
  add_shared(bounds, shared);
  bounds->add_option("--p", bf.ps, "dimensions")->delimiter(',');
  bounds->add_option("--lambda", bf.lambdas, "resolutions")->delimiter(',');
  bounds->add_option("--delta", bf.delta, "confidence level")->check(CLI::Range(0.0, 1.0));
  bounds->add_option("--n", bf.n, "number of examples for the gaps");
  bounds->add_option("--rho", bf.rho, "real coefficients to round (default: logistic fit)")->delimiter(',');
  bounds->add_option("--k", bf.k, "tolerate k-1 extra mistakes");

  std::string model_path;
  std::string format;
  auto* rend = app.add_subcommand("render", "print a trained model");
  rend->add_option("--model", model_path, "model JSON")->required();
  rend->add_option("--format", format, "scoring-table, mofn-table, score-function or machine-readable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*train) return run_train(shared);
    if (*cv) return run_cv(shared, folds);
    if (*sweep) return run_sweep(shared, c0_values, points);
    if (*red) return run_reduce(shared, width, proxy, remove_correct);
    if (*bounds) return run_bounds(shared, bf);
    if (*rend) return run_render(model_path, format);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
