#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "instances.hpp"
#include "slimkit/brute_force.hpp"
#include "slimkit/formulation.hpp"
#include "slimkit/reduction.hpp"

using namespace slimkit;
using namespace slimkit::testing;

namespace {

// Two shifted clusters with four flipped labels.
Dataset outlier_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(-100, 100);
  Eigen::MatrixXd X(20, 2);
  Eigen::VectorXi y(20);
  for (int i = 0; i < 20; ++i) {
    y(i) = i % 2 ? 1 : -1;
    for (int j = 0; j < 2; ++j) X(i, j) = u(rng) / 100.0 + (y(i) > 0 ? 0.4 : 0.0);
  }
  for (int i = 0; i < 4; ++i) y(i) = -y(i);
  return make_dataset(X, y);
}

ModelSpec small_spec(const Dataset& d, double c0) {
  PenaltyConfig pen;
  pen.c0 = c0;
  return make_slim_spec(
      d, InterpretabilitySet::uniform(2, CoefficientSet::symmetric(3), CoefficientSet::symmetric(3)), pen,
      ClassWeights{}, {});
}

}  // namespace

TEST_CASE("proxy names round trip") {
  CHECK(parse_proxy_kind(to_string(ProxyKind::kHinge)) == ProxyKind::kHinge);
  CHECK(parse_proxy_kind(to_string(ProxyKind::kRelaxation)) == ProxyKind::kRelaxation);
  CHECK_THROWS(parse_proxy_kind("svm"));
}

TEST_CASE("proxy objective is a lower bound for the relaxation") {
  const Dataset d = outlier_dataset(1);
  const ModelSpec spec = small_spec(d, 0.05);
  const ReductionProfile prof = reduction_profile(d, spec, {});
  const BruteForceResult bf = brute_force(spec, d);
  CHECK(prof.proxy_objective <= bf.objective + 1e-9);
  for (const auto& v : bf.argmin) {
    CHECK(proxy_objective_at(d, spec, ProxyKind::kRelaxation, v) <= bf.objective + 1e-9);
  }
  for (int i = 0; i < d.n(); ++i) CHECK(prof.variant(i) >= prof.proxy_objective - 1e-9);
  Eigen::VectorXd outside(3);
  outside << 9, 0, 0;
  CHECK(std::isinf(proxy_objective_at(d, spec, ProxyKind::kHinge, outside)));
}

TEST_CASE("hinge proxy reduction keeps the argmin and the fixed labels") {
  int removed = 0;
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const Dataset d = outlier_dataset(seed);
    const ModelSpec spec = small_spec(d, 0.02 + 0.05 * (seed % 4));
    const BruteForceResult full = brute_force(spec, d);
    ReductionConfig cfg;
    cfg.proxy = ProxyKind::kHinge;
    const ReductionProfile prof = reduction_profile(d, spec, cfg);
    double eps = 0.0;
    for (const auto& v : full.argmin) eps = std::max(eps, proxy_objective_at(d, spec, cfg.proxy, v) - prof.proxy_objective);
    const ReductionResult r = apply_level_set(prof, d, spec, eps);
    CHECK(r.reduced.n() + static_cast<int>(r.removed.size()) == d.n());
    CHECK(r.reduced_spec.loss_scale == doctest::Approx(static_cast<double>(r.reduced.n()) / d.n()));
    const BruteForceResult red = brute_force(r.reduced_spec, r.reduced);
    CHECK(as_set(full.argmin) == as_set(red.argmin));
    for (size_t k = 0; k < r.removed.size(); ++k) {
      CHECK_FALSE(r.removed_correct[k]);
      for (const auto& v : full.argmin) {
        CHECK((d.X.row(r.removed[k]).dot(v) > 0 ? 1 : -1) == r.removed_labels[k]);
      }
    }
    removed += static_cast<int>(r.removed.size());
  }
  CHECK(removed > 0);
}

TEST_CASE("the relaxation width from a feasible point is safe") {
  const Dataset d = outlier_dataset(3);
  const ModelSpec spec = small_spec(d, 0.05);
  const BruteForceResult full = brute_force(spec, d);
  const ReductionProfile prof = reduction_profile(d, spec, {});
  const double eps = epsilon_from_feasible(full.objective, prof.proxy_objective);
  const ReductionResult r = apply_level_set(prof, d, spec, eps);
  CHECK(as_set(brute_force(r.reduced_spec, r.reduced).argmin) == as_set(full.argmin));
  CHECK_THROWS(epsilon_from_feasible(prof.proxy_objective - 1.0, prof.proxy_objective));
}

TEST_CASE("wider level sets remove fewer examples") {
  const Dataset d = outlier_dataset(12);
  const ModelSpec spec = small_spec(d, 0.07);
  ReductionConfig cfg;
  cfg.proxy = ProxyKind::kHinge;
  cfg.remove_fixed_correct = true;
  size_t last = d.n() + 1;
  for (double eps : {0.0, 0.01, 0.05, 0.1, 0.5, 2.0}) {
    cfg.level_set_width = eps;
    const ReductionResult r = reduce(d, spec, cfg);
    CHECK(r.removed.size() <= last);
    last = r.removed.size();
  }
  CHECK(last == 0);
}

TEST_CASE("rate constraints are rejected and the report lists every example") {
  const Dataset d = outlier_dataset(2);
  ModelSpec spec = small_spec(d, 0.05);
  ReductionConfig cfg;
  cfg.proxy = ProxyKind::kHinge;
  cfg.level_set_width = 0.01;
  const ReductionResult r = reduce(d, spec, cfg);
  std::istringstream csv(r.to_csv(d));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "index,label,fixed_label,fixed_correct,variant_objective,removed,infeasible_variant");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == d.n());

  spec.ops.max_fpr = 0.2;
  CHECK_THROWS(reduce(d, spec, cfg));
}

TEST_CASE("level-set certificate") {
  const CertificateCheck ok = check_level_set_certificate({1.0, 1.0, 0.1, 0.5});
  CHECK(ok.satisfied);
  CHECK(ok.epsilon == doctest::Approx(0.1));
  const CertificateCheck bad = check_level_set_certificate({1.0, 1.0, 0.3, 0.5});
  CHECK_FALSE(bad.satisfied);
  CHECK_FALSE(bad.violated.empty());
  CHECK_THROWS(check_level_set_certificate({0.0, 1.0, 0.1, 0.5}));
}
