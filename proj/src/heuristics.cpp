#include "slimkit/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "slimkit/formulation.hpp"

namespace slimkit {

namespace {

constexpr double kImprovement = 1e-12;

struct Threshold {
  double at;
  double weight;
};

}  // namespace

double nearest_value(const CoefficientSet& set, double v) {
  const auto& values = set.values();
  auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it == values.begin()) return *it;
  if (it == values.end()) return values.back();
  const double hi = *it;
  const double lo = *(it - 1);
  const double dhi = hi - v;
  const double dlo = v - lo;
  if (dhi < dlo) return hi;
  if (dlo < dhi) return lo;
  return std::abs(lo) <= std::abs(hi) ? lo : hi;
}

double penalized_objective(const ModelSpec& spec, const Dataset& data,
                           const Eigen::VectorXd& lambda) {
  const Evaluation e = evaluate(spec, data, lambda);
  return e.feasible ? e.objective : std::numeric_limits<double>::infinity();
}

double best_intercept(const ModelSpec& spec, const Dataset& data, const Eigen::VectorXd& lambda) {
  const CoefficientSet& L0 = spec.coefficients[0];
  if (L0.size() == 1) return L0.values()[0];
  const double g = spec.margin > 0.0 ? spec.margin : 0.0;
  const Eigen::VectorXd base = data.X.rightCols(data.p()) * lambda.tail(data.p());
  // Positive i errs iff lambda0 < g - s_i; negative i iff lambda0 > -g - s_i
  // (margin > 0). With margin <= 0 the boundaries become inclusive, which the
  // sweep approximates; the caller re-evaluates the chosen vector exactly.
  std::vector<Threshold> pos, neg;
  std::vector<double> all;
  for (int i = 0; i < data.n(); ++i) {
    const double w = spec.weights.scale(data.y(i));
    if (data.y(i) > 0) {
      pos.push_back({g - base(i), w});
    } else {
      neg.push_back({-g - base(i), w});
    }
    all.push_back(-g - base(i));
  }
  auto by_at = [](const Threshold& a, const Threshold& b) { return a.at < b.at; };
  std::sort(pos.begin(), pos.end(), by_at);
  std::sort(neg.begin(), neg.end(), by_at);
  std::sort(all.begin(), all.end());
  double pos_total = 0.0;
  for (const auto& t : pos) pos_total += t.weight;

  const auto& ops = spec.ops;
  const int fp_cap = ops.max_fpr ? rate_cap(*ops.max_fpr, data.n_negative()) : data.n();
  const int fn_cap = ops.max_fnr ? rate_cap(*ops.max_fnr, data.n_positive()) : data.n();
  const int pp_cap = ops.max_positive_rate ? rate_cap(*ops.max_positive_rate, data.n()) : data.n();

  size_t ip = 0, in = 0, ia = 0;
  double pos_ok = 0.0;  // weight of positives with threshold <= lambda0 (correct)
  double neg_err = 0.0;
  int pos_ok_count = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  double best_value = lambda(0);
  for (double v : L0.values()) {
    while (ip < pos.size() && pos[ip].at <= v) {
      pos_ok += pos[ip].weight;
      ++pos_ok_count;
      ++ip;
    }
    while (in < neg.size() && neg[in].at < v) {
      neg_err += neg[in].weight;
      ++in;
    }
    while (ia < all.size() && all[ia] < v) ++ia;
    const int fn = static_cast<int>(pos.size()) - pos_ok_count;
    const int fp = static_cast<int>(in);
    const int predicted = static_cast<int>(ia);
    if (fp > fp_cap || fn > fn_cap || predicted > pp_cap) continue;
    const double loss = (pos_total - pos_ok) + neg_err;
    if (loss < best_loss - 1e-15 ||
        (std::abs(loss - best_loss) <= 1e-15 && std::abs(v) < std::abs(best_value))) {
      best_loss = loss;
      best_value = v;
    }
  }
  return best_value;
}

Eigen::VectorXd local_search(const ModelSpec& spec, const Dataset& data, Eigen::VectorXd start,
                             const LocalSearchOptions& opts) {
  const int k = spec.coefficients.size();
  for (int j = 0; j < k; ++j) start(j) = nearest_value(spec.coefficients[j], start(j));
  Eigen::VectorXd best = start;
  double best_value = penalized_objective(spec, data, best);
  if (!std::isfinite(best_value)) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(k);
    const double z = penalized_objective(spec, data, zero);
    if (z < best_value) {
      best = zero;
      best_value = z;
    }
  }
  auto try_candidate = [&](Eigen::VectorXd cand, Eigen::VectorXd& round_best, double& round_value) {
    const double v = penalized_objective(spec, data, cand);
    if (v < round_value - kImprovement) {
      round_value = v;
      round_best = std::move(cand);
      return;
    }
    cand(0) = best_intercept(spec, data, cand);
    const double w = penalized_objective(spec, data, cand);
    if (w < round_value - kImprovement) {
      round_value = w;
      round_best = std::move(cand);
    }
  };
  for (int pass = 0; pass < opts.max_passes; ++pass) {
    Eigen::VectorXd round_best = best;
    double round_value = best_value;
    Eigen::VectorXd cand = best;
    cand(0) = best_intercept(spec, data, best);
    try_candidate(cand, round_best, round_value);
    for (int j = 1; j < k; ++j) {
      for (double v : spec.coefficients[j].values()) {
        if (v == best(j)) continue;
        Eigen::VectorXd c = best;
        c(j) = v;
        try_candidate(std::move(c), round_best, round_value);
      }
    }
    if (round_value < best_value - kImprovement) {
      best = std::move(round_best);
      best_value = round_value;
    } else {
      break;
    }
  }
  return best;
}

Eigen::VectorXd logistic_regression(const Dataset& data, const ClassWeights& weights, double ridge) {
  const int k = data.p() + 1;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd w(data.n());
  Eigen::VectorXd yv(data.n());
  for (int i = 0; i < data.n(); ++i) {
    w(i) = weights.scale(data.y(i));
    yv(i) = data.y(i);
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(k, ridge * data.n());
  penalty(0) = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::VectorXd margin = yv.cwiseProduct(data.X * beta);
    Eigen::VectorXd coef(data.n());
    Eigen::VectorXd curv(data.n());
    for (int i = 0; i < data.n(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(margin(i)));  // sigma(-y beta x)
      coef(i) = -w(i) * yv(i) * s;
      curv(i) = w(i) * s * (1.0 - s);
    }
    const Eigen::VectorXd grad = data.X.transpose() * coef + penalty.cwiseProduct(beta);
    Eigen::MatrixXd hess = data.X.transpose() * curv.asDiagonal() * data.X;
    hess.diagonal() += penalty + Eigen::VectorXd::Constant(k, 1e-9 * data.n());
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) break;
    beta -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return beta;
}

Eigen::VectorXd warm_start(const ModelSpec& spec, const Dataset& data) {
  const int k = spec.coefficients.size();
  std::vector<std::pair<double, Eigen::VectorXd>> seeds;
  auto add_seed = [&](Eigen::VectorXd lambda) {
    for (int j = 0; j < k; ++j) lambda(j) = nearest_value(spec.coefficients[j], lambda(j));
    lambda(0) = best_intercept(spec, data, lambda);
    seeds.emplace_back(penalized_objective(spec, data, lambda), std::move(lambda));
  };
  add_seed(Eigen::VectorXd::Zero(k));
  const Eigen::VectorXd rho = logistic_regression(data, spec.weights);
  const double top = rho.tail(k - 1).cwiseAbs().maxCoeff();
  double reach = 0.0;
  for (int j = 1; j < k; ++j) reach = std::max(reach, spec.coefficients[j].max_abs());
  if (top > 0.0 && reach > 0.0) {
    const int steps = static_cast<int>(std::min(reach, 20.0));
    for (int s = 1; s <= steps; ++s) {
      const double scale = reach * s / steps / top;
      add_seed(rho * scale);
    }
  }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  Eigen::VectorXd best = seeds.front().second;
  double best_value = penalized_objective(spec, data, best);
  const size_t polish = std::min<size_t>(seeds.size(), 4);
  for (size_t s = 0; s < polish; ++s) {
    Eigen::VectorXd cand = local_search(spec, data, seeds[s].second);
    const double v = penalized_objective(spec, data, cand);
    if (v < best_value - kImprovement) {
      best = std::move(cand);
      best_value = v;
    }
  }
  return best;
}

Heuristic make_rounding_heuristic(const IntegerProgram& ip, const Dataset& data, int polish_passes) {
  return [&ip, &data, polish_passes](const std::vector<double>& x) -> std::optional<std::vector<double>> {
    if (!ip.spec) return std::nullopt;
    const ModelSpec& spec = *ip.spec;
    Eigen::VectorXd lambda(static_cast<Eigen::Index>(ip.coefficients.size()));
    for (size_t j = 0; j < ip.coefficients.size(); ++j) {
      lambda(j) = nearest_value(spec.coefficients[static_cast<int>(j)], x[ip.coefficients[j].lambda]);
    }
    lambda = local_search(spec, data, lambda, {polish_passes});
    return encode_solution(ip, data, lambda);
  };
}

}  // namespace slimkit
