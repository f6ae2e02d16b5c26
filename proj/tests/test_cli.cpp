#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "instances.hpp"
#include "slimkit/brute_force.hpp"
#include "slimkit/config.hpp"
#include "slimkit/formulation.hpp"
#include "slimkit/model.hpp"
#include "slimkit/pipeline.hpp"

using namespace slimkit;
using namespace slimkit::testing;
using nlohmann::json;

namespace {

PreparedData prepared_from(const Dataset& d) {
  PreparedData p;
  p.data = d;
  p.source_names = d.feature_names;
  return p;
}

TrainedModel breastcancer_style_model() {
  TrainedModel m;
  m.feature_names = {"(Intercept)", "UniformityOfCellSize", "BareNuclei", "Mitoses"};
  m.coefficients = {-17, 4, 2, 0};
  m.model_size = 2;
  m.status = "optimal";
  return m;
}

TrainedModel mofn_model(double lambda0, int selected) {
  TrainedModel m;
  m.family = ModelFamily::kMofN;
  m.feature_names = {"(Intercept)"};
  m.coefficients = {lambda0};
  for (int r = 0; r < 9; ++r) {
    const std::string parent = "f" + std::to_string(r);
    m.feature_names.push_back(parent + ">=3");
    m.rules.push_back({parent + ">=3", parent, RuleOrigin::kThreshold, 3.0, "", false});
    m.coefficients.push_back(r < selected ? 1.0 : 0.0);
  }
  m.model_size = selected;
  return m;
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(SLIMKIT_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config parsing fills every section and rejects unknown keys") {
  const json doc = {{"family", "mofn"},
                    {"seed", 7},
                    {"coefficients", {{"intercept", {{"lo", -5}, {"hi", 5}}}, {"default", {{"values", {-2, 0, 3}}}}}},
                    {"penalty", {{"c0_over_np", 0.9}}},
                    {"constraints", {{"max_fpr", 0.2}, {"signs", {{"a", "non-negative"}}}}},
                    {"binarize", {{"policy", "list"}, {"thresholds", {3}}}},
                    {"solver", {{"time_limit", 5}}},
                    {"cv", {{"folds", 5}}}};
  const TrainConfig c = parse_config(doc);
  CHECK(c.family == ModelFamily::kMofN);
  CHECK(c.seed == 7);
  CHECK(c.intercept == CoefficientSet::integer_range(-5, 5));
  CHECK(c.coefficient.values() == std::vector<double>{-2, 0, 3});
  CHECK(c.c0_over_np.value() == 0.9);
  CHECK(c.max_fpr.value() == 0.2);
  CHECK(c.signs.at("a") == SignConstraint::kNonNegative);
  CHECK(c.thresholds.kind == ThresholdPolicyKind::kExplicitList);
  CHECK(c.thresholds.include_complements);
  CHECK(c.time_limit == 5.0);
  CHECK(c.folds == 5);
  CHECK(parse_config(config_to_json(c)).seed == 7);
  CHECK(config_to_json(parse_config(config_to_json(c))) == config_to_json(c));

  try {
    parse_config({{"constraints", {{"max_fp", 0.2}}}});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "constraints.max_fp");
  }
  CHECK_THROWS_AS(parse_config({{"solver", {{"time_limit", "soon"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"family", "forest"}}), ConfigError);
  CHECK(parse_coefficient_set(json(3), "x") == CoefficientSet::symmetric(3));
  CHECK(parse_coefficient_set(json("two-significant-digits"), "x").contains(45.0));
}

TEST_CASE("model documents round trip exactly") {
  TrainedModel m = mofn_model(-4, 8);
  m.transform = {{0, 1}, {1.5, 2.0}};
  m.objective = 0.1 / 3.0;
  m.gap = std::numeric_limits<double>::infinity();
  m.dual_bound = -std::numeric_limits<double>::infinity();
  m.error = 1.0 / 7.0;
  const TrainedModel back = model_from_json(json::parse(to_json(m).dump()));
  CHECK(back == m);
  CHECK(model_from_json(json::parse(render(m, RenderFormat::kMachineReadable))) == m);
  CHECK_THROWS(model_from_json(json{{"family", "slim"}}));
}

TEST_CASE("scoring tables") {
  const TrainedModel m = breastcancer_style_model();
  const std::string table = render(m, RenderFormat::kScoringTable);
  CHECK(table.find("PREDICT +1 IF SCORE > 17") != std::string::npos);
  CHECK(table.find("UniformityOfCellSize  \xC3\x97      4") != std::string::npos);
  CHECK(table.find("BareNuclei") != std::string::npos);
  CHECK(table.find("Mitoses") == std::string::npos);
  CHECK(table.find("ADD POINTS FROM ROWS 1 TO 2 = SCORE") != std::string::npos);
  CHECK(render(m, RenderFormat::kScoreFunction).find("SCORE = -17 + 4 * [UniformityOfCellSize]") == 0);

  TrainedModel zero = m;
  zero.coefficients = {1, 0, 0, 0};
  CHECK(render(zero, RenderFormat::kScoringTable).find("EVERY EXAMPLE IS PREDICTED +1") != std::string::npos);
  zero.coefficients = {0, 0, 0, 0};
  CHECK(render(zero, RenderFormat::kScoringTable).find("EVERY EXAMPLE IS PREDICTED -1") != std::string::npos);
}

TEST_CASE("category indicators sharing a coefficient merge into a set") {
  TrainedModel m;
  m.feature_names = {"(Intercept)", "odor=none", "odor=almond", "odor=foul"};
  m.coefficients = {-1, 3, 3, -2};
  for (const char* c : {"none", "almond", "foul"}) {
    m.rules.push_back({std::string("odor=") + c, "odor", RuleOrigin::kCategoryIndicator, 0.0, c, false});
  }
  const std::string table = render(m, RenderFormat::kScoringTable);
  CHECK(table.find("odor in {none, almond}") != std::string::npos);
  CHECK(table.find("odor = foul") != std::string::npos);
}

TEST_CASE("M-of-N tables state M from the decision rule") {
  // score = sum of rules + lambda_0 > 0  <=>  at least 1 - lambda_0 rules
  const std::string five = render(mofn_model(-4, 8), RenderFormat::kMofNTable);
  CHECK(five.find("PREDICT +1 IF AT LEAST 5 OF THE FOLLOWING 8 RULES ARE TRUE") == 0);
  CHECK(render(mofn_model(-5, 8), RenderFormat::kMofNTable).find("AT LEAST 6 OF THE FOLLOWING 8") != std::string::npos);
  CHECK(render(mofn_model(1, 2), RenderFormat::kMofNTable).find("PREDICT +1 FOR EVERY EXAMPLE") == 0);
  CHECK(render(mofn_model(-3, 2), RenderFormat::kMofNTable).find("PREDICT -1 FOR EVERY EXAMPLE") == 0);
  CHECK(parse_render_format("mofn-table") == RenderFormat::kMofNTable);
  CHECK_THROWS(parse_render_format("pdf"));
}

TEST_CASE("certification recomputes every constraint") {
  std::mt19937_64 rng(4);
  const Dataset d = random_dataset(rng, 30, 3);
  OperationalConstraints ops;
  ops.max_model_size = 1;
  ops.signs = {SignConstraint::kFree, SignConstraint::kNonPositive, SignConstraint::kFree, SignConstraint::kFree};
  ops.max_fpr = 0.0;
  ops.either_or = {{2, 3}};
  const auto L = InterpretabilitySet::uniform(3, CoefficientSet::symmetric(3), CoefficientSet::symmetric(3));
  Eigen::VectorXd ok(4);
  ok << -3, 0, 0, 0;
  CHECK(certify(ops, L, d, ok).empty());
  Eigen::VectorXd bad(4);
  bad << 3, 1, 1, 1;
  const auto v = certify(ops, L, d, bad);
  CHECK(v.size() >= 4);  // size, sign, either-or and FPR
  Eigen::VectorXd outside(4);
  outside << 0, 0, 9, 0;
  CHECK_FALSE(certify({}, L, d, outside).empty());
}

TEST_CASE("training metrics equal a direct re-scoring") {
  std::mt19937_64 rng(6);
  const Dataset d = random_dataset(rng, 40, 3);
  TrainConfig c;
  c.c0 = 0.01;
  c.time_limit = 10;
  const TrainResult r = train_model(prepared_from(d), d, c);
  REQUIRE(r.has_model());
  const Eigen::VectorXd l = r.model.lambda();
  int wrong = 0, fp = 0, neg = 0, tp = 0, pos = 0;
  for (int i = 0; i < d.n(); ++i) {
    const int pred = d.X.row(i).dot(l) > 0 ? 1 : -1;
    wrong += pred != d.y(i);
    if (d.y(i) > 0) {
      ++pos;
      tp += pred > 0;
    } else {
      ++neg;
      fp += pred > 0;
    }
  }
  CHECK(r.model.error == doctest::Approx(static_cast<double>(wrong) / d.n()));
  CHECK(r.model.tpr == doctest::Approx(static_cast<double>(tp) / pos));
  CHECK(r.model.fpr == doctest::Approx(static_cast<double>(fp) / neg));
  int size = 0;
  for (int j = 1; j < l.size(); ++j) size += l(j) != 0;
  CHECK(r.model.model_size == size);
  CHECK(r.status == SolveStatus::kOptimal);
}

TEST_CASE("very large C0 gives the zero model and identical runs give identical files") {
  std::mt19937_64 rng(8);
  const Dataset d = random_dataset(rng, 30, 3);
  TrainConfig c;
  c.c0 = 1.0 - 1.0 / d.n() + 1e-3;
  const TrainResult zero = train_model(prepared_from(d), d, c);
  CHECK(zero.model.model_size == 0);

  c.c0 = 0.02;
  c.seed = 3;
  const std::string a = to_json(train_model(prepared_from(d), d, c).model).dump(2);
  const std::string b = to_json(train_model(prepared_from(d), d, c).model).dump(2);
  CHECK(a == b);
}

TEST_CASE("stratified folds") {
  std::mt19937_64 rng(2);
  const Dataset d = random_dataset(rng, 53, 2);
  const std::vector<int> f = stratified_folds(d, 10, 11);
  CHECK(f == stratified_folds(d, 10, 11));
  CHECK(f != stratified_folds(d, 10, 12));
  std::vector<int> size(10), pos(10);
  for (int i = 0; i < d.n(); ++i) {
    ++size[f[i]];
    pos[f[i]] += d.y(i) > 0;
  }
  CHECK(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()) <= 1);
  CHECK(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()) <= 1);
  CHECK_THROWS(stratified_folds(d, 1, 0));
  CHECK_THROWS(stratified_folds(d, 54, 0));
}

TEST_CASE("leave-one-out cross-validation on five points") {
  Eigen::MatrixXd X(5, 1);
  X << -2, -1, 1, 2, 3;
  Eigen::VectorXi y(5);
  y << -1, -1, 1, 1, 1;
  const Dataset d = make_dataset(X, y);
  TrainConfig c;
  c.folds = 5;
  c.c0 = 0.01;
  c.threads = 2;
  const CvResult cv = cross_validate(prepared_from(d), c);
  CHECK(cv.folds.size() == 5);
  for (const auto& f : cv.folds) {
    CHECK(f.n_test == 1);
    CHECK(f.n_train == 4);
  }
  CHECK(cv.final_model.has_model());
  CHECK(cv.mean_test_error == doctest::Approx(0.0));
  CHECK(cv.to_csv().rfind("all,", std::string::npos) != std::string::npos);

  // a fold whose training part loses a class
  Eigen::VectorXi lone(5);
  lone << 1, -1, -1, -1, -1;
  CHECK_THROWS(cross_validate(prepared_from(make_dataset(X, lone)), c));
}

TEST_CASE("regularization sweeps") {
  std::mt19937_64 rng(13);
  const Dataset d = random_dataset(rng, 30, 2);
  TrainConfig c;
  c.coefficient = CoefficientSet::symmetric(2);
  c.intercept = CoefficientSet::symmetric(2);
  CHECK(sweep_regularization(prepared_from(d), c, {}).empty());
  CHECK(sweep_csv({}) == "c0,train_error,test_error,model_size,status\n");

  // two C0 values with the same optimum set give the same model
  const double n = 0.7 * d.n();
  const auto rows = sweep_regularization(prepared_from(d), c, {0.3 / (n * 2), 0.35 / (n * 2), 0.999});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].coefficients == rows[1].coefficients);
  CHECK(rows[2].model_size == 0);
  CHECK(rows[0].train_error <= rows[2].train_error);
}

TEST_CASE("two C0 values in one equivalence class share their optima") {
  std::mt19937_64 rng(17);
  const Dataset d = random_dataset(rng, 20, 2);
  const auto L = InterpretabilitySet::uniform(2, CoefficientSet::symmetric(2), CoefficientSet::symmetric(2));
  auto argmin = [&](double c0) {
    PenaltyConfig pen;
    pen.c0 = c0;
    pen.l1_tiebreak = 1e-6;
    return as_set(brute_force(make_slim_spec(d, L, pen, ClassWeights{}, {}), d).argmin);
  };
  CHECK(argmin(0.2 / (20 * 2)) == argmin(0.3 / (20 * 2)));
  TrainConfig c;
  c.coefficient = CoefficientSet::symmetric(2);
  c.intercept = CoefficientSet::symmetric(2);
  c.l1_tiebreak = 1e-6;
  c.c0 = 0.2 / 40;
  const TrainResult a = train_model(prepared_from(d), d, c);
  c.c0 = 0.3 / 40;
  const TrainResult b = train_model(prepared_from(d), d, c);
  CHECK(a.model.coefficients == b.model.coefficients);
  CHECK(argmin(0.2 / 40).count(a.model.coefficients) == 1);
}

TEST_CASE("command line exit codes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "slimkit_cli_test";
  fs::create_directories(dir);
  const std::string data = std::string(SLIMKIT_DATA_DIR) + "/breastcancer.csv";
  const std::string schema = std::string(SLIMKIT_DATA_DIR) + "/breastcancer.schema";
  {
    std::ofstream(dir / "bad.json") << R"({"solver": {"time_limt": 5}})";
    std::ofstream(dir / "infeasible.json")
        << R"({"constraints": {"max_fpr": 0, "max_fnr": 0, "max_model_size": 0}, "solver": {"time_limit": 5}})";
  }
  const std::string common = "--data " + data + " --schema " + schema + " --out-dir " + dir.string();
  CHECK(run_cli("train --config " + (dir / "bad.json").string() + " " + common) == 2);
  CHECK(run_cli("train --family nonsense " + common) == 2);
  CHECK(run_cli("train --config " + (dir / "infeasible.json").string() + " " + common) == 3);
  CHECK(run_cli("train --time-limit 3 --c0 0.025 " + common) == 0);
  CHECK(fs::exists(dir / "model.json"));
  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(run_cli("render --model " + (dir / "model.json").string()) == 0);
  CHECK(run_cli("bounds --out-dir " + dir.string()) == 0);
  CHECK(fs::exists(dir / "density.csv"));
  CHECK(run_cli("frobnicate") == 2);
  fs::remove_all(dir);
}
