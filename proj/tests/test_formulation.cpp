#include <doctest.h>

#include <random>

#include "instances.hpp"
#include "slimkit/brute_force.hpp"
#include "slimkit/formulation.hpp"
#include "slimkit/heuristics.hpp"
#include "slimkit/milp.hpp"

using namespace slimkit;
using namespace slimkit::testing;

namespace {

Eigen::VectorXd solve_spec(const Dataset& d, const ModelSpec& spec, SolveStatus* status = nullptr) {
  const IntegerProgram ip = build_program(d, spec);
  const SolveResult r = solve(ip);
  if (status) *status = r.status;
  if (!r.has_incumbent()) return {};
  return ip.decode_lambda(r.x);
}

}  // namespace

TEST_CASE("big-M values bound every score") {
  Eigen::MatrixXd X(2, 2);
  X << 1, -2, 0, 3;
  Eigen::VectorXi y(2);
  y << 1, -1;
  const Dataset d = make_dataset(X, y);
  const auto L = InterpretabilitySet::uniform(2, CoefficientSet::symmetric(4), CoefficientSet::symmetric(2));
  const BigMParameters m = compute_big_m(d, L, 0.1);
  // example 0: margin + 4 + 2*1 + 2*2
  CHECK(m.m[0] == doctest::Approx(10.1));
  CHECK(m.m[1] == doctest::Approx(0.1 + 4 + 0 + 6));
}

TEST_CASE("default tiebreak stays below one mistake and one C0") {
  const auto L = InterpretabilitySet::uniform(3, CoefficientSet::symmetric(10), CoefficientSet::symmetric(10));
  const double eps = default_l1_tiebreak(0.01, 50, L, ClassWeights{});
  CHECK(eps * L.max_l1_norm() < 0.01);
  CHECK(eps * L.max_l1_norm() < 1.0 / 50);
  std::mt19937_64 rng(1);
  CHECK(default_margin(random_dataset(rng, 10, 2)) > 0.0);
}

TEST_CASE("SLIM matches brute force with operational constraints") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 10; ++t) {
    const Dataset d = random_dataset(rng, 18, 3);
    OperationalConstraints ops;
    ops.max_model_size = 2;
    ops.max_fpr = 0.3;
    ops.signs = {SignConstraint::kFree, SignConstraint::kNonNegative, SignConstraint::kFree, SignConstraint::kFree};
    if (t % 2) ops.either_or = {{2, 3}};
    else ops.if_then = {IfThenConstraint{{2}, 3}};
    PenaltyConfig pen;
    pen.c0 = 0.02;
    const ModelSpec spec = make_slim_spec(
        d, InterpretabilitySet::uniform(3, CoefficientSet::symmetric(2), CoefficientSet::symmetric(2)), pen,
        ClassWeights{}, ops);
    const BruteForceResult bf = brute_force(spec, d);
    SolveStatus status;
    const Eigen::VectorXd l = solve_spec(d, spec, &status);
    REQUIRE(bf.feasible);
    REQUIRE(status == SolveStatus::kOptimal);
    CHECK(evaluate(spec, d, l).objective == doctest::Approx(bf.objective).epsilon(1e-12));
    CHECK(in_argmin(bf, l));
    CHECK_FALSE(structural_violation(spec, l).has_value());
    CHECK_FALSE(rate_violation(spec, d, d.X * l).has_value());
  }
}

TEST_CASE("PILM charges each coefficient its level cost") {
  std::mt19937_64 rng(5);
  const Dataset d = random_dataset(rng, 20, 3);
  std::vector<PenaltyLevel> levels{{{-1, 1}, 0.01}, {{-3, -2, 2, 3}, 0.05}};
  const ModelSpec spec = make_pilm_spec(d, CoefficientSet::symmetric(3), levels, ClassWeights{}, {});
  CHECK(spec.penalty.level_cost(0.0) == 0.0);
  CHECK(spec.penalty.level_cost(-2.0) == doctest::Approx(0.05));
  const BruteForceResult bf = brute_force(spec, d);
  const Eigen::VectorXd l = solve_spec(d, spec);
  REQUIRE(l.size() == 4);
  CHECK(evaluate(spec, d, l).objective == doctest::Approx(bf.objective).epsilon(1e-12));
  CHECK(in_argmin(bf, l));
}

TEST_CASE("M-of-N and TILM on rule columns match brute force") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 4; ++t) {
    Dataset raw = random_dataset(rng, 20, 2);
    ThresholdPolicy policy;
    policy.kind = ThresholdPolicyKind::kExplicitList;
    policy.thresholds = {-1, 1};
    const auto [rules, set] = binarize(raw, policy);
    const ModelSpec mofn = make_mofn_spec(rules, 0.01, ClassWeights{}, {});
    CHECK(mofn.coefficients[0].min() == -rules.p());
    CHECK(mofn.coefficients[1].values() == std::vector<double>{0, 1});
    const BruteForceResult bm = brute_force(mofn, rules);
    const Eigen::VectorXd lm = solve_spec(rules, mofn);
    CHECK(evaluate(mofn, rules, lm).objective == doctest::Approx(bm.objective).epsilon(1e-12));
    CHECK(in_argmin(bm, lm));

    std::vector<std::vector<int>> groups{set.columns_by_feature[1], set.columns_by_feature[2]};
    PenaltyConfig pen;
    pen.feature_cost = 0.02;
    pen.rule_cost = 0.005;
    pen.max_rules_per_feature = 1;
    const ModelSpec tilm = make_tilm_spec(
        rules, groups, InterpretabilitySet::uniform(rules.p(), CoefficientSet::symmetric(2), CoefficientSet::symmetric(2)),
        pen, ClassWeights{}, {});
    const BruteForceResult bt = brute_force(tilm, rules);
    const Eigen::VectorXd lt = solve_spec(rules, tilm);
    CHECK(evaluate(tilm, rules, lt).objective == doctest::Approx(bt.objective).epsilon(1e-12));
    CHECK(in_argmin(bt, lt));
  }
}

TEST_CASE("encoding a coefficient vector gives a feasible assignment with the same objective") {
  std::mt19937_64 rng(21);
  const Dataset d = random_dataset(rng, 15, 2);
  PenaltyConfig pen;
  pen.c0 = 0.05;
  const ModelSpec spec = make_slim_spec(
      d, InterpretabilitySet::uniform(2, CoefficientSet::symmetric(3), CoefficientSet::symmetric(3)), pen,
      ClassWeights{}, {});
  const IntegerProgram ip = build_program(d, spec);
  Eigen::VectorXd l(3);
  l << 1, -2, 3;
  const auto x = encode_solution(ip, d, l);
  REQUIRE(x.has_value());
  CHECK(ip.max_violation(*x) < 1e-9);
  CHECK(ip.objective_value(*x) == doctest::Approx(evaluate(spec, d, l).objective));
  CHECK(ip.decode_lambda(*x) == l);
}

TEST_CASE("infeasible constraint sets are reported as such") {
  std::mt19937_64 rng(3);
  const Dataset d = random_dataset(rng, 12, 2);
  OperationalConstraints ops;
  ops.max_fpr = 0.0;
  ops.max_fnr = 0.0;
  ops.max_model_size = 0;
  PenaltyConfig pen;
  pen.c0 = 0.01;
  const ModelSpec spec = make_slim_spec(
      d, InterpretabilitySet::uniform(2, CoefficientSet::symmetric(2), CoefficientSet::symmetric(2)), pen,
      ClassWeights{}, ops);
  CHECK(zero_model_obstruction(spec, d).has_value());
  SolveStatus status;
  solve_spec(d, spec, &status);
  CHECK(status == SolveStatus::kInfeasible);
  CHECK_FALSE(brute_force(spec, d).feasible);
}

TEST_CASE("warm start is feasible and never worse than the zero model") {
  std::mt19937_64 rng(8);
  const Dataset d = random_dataset(rng, 40, 4);
  PenaltyConfig pen;
  pen.c0 = 0.01;
  const ModelSpec spec = make_slim_spec(
      d, InterpretabilitySet::uniform(4, CoefficientSet::symmetric(10), CoefficientSet::symmetric(5)), pen,
      ClassWeights{}, {});
  const Eigen::VectorXd w = warm_start(spec, d);
  CHECK(spec.coefficients.contains(w));
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
  zero(0) = best_intercept(spec, d, zero);
  CHECK(evaluate(spec, d, w).objective <= evaluate(spec, d, zero).objective + 1e-12);
}
