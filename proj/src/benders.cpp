#include "slimkit/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slimkit/formulation.hpp"

namespace slimkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// sigma(-m) = 1 / (1 + exp(m)).
double sigmoid_neg(double m) {
  if (m >= 0.0) {
    const double e = std::exp(-m);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(m));
}

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kHinge:
      return "hinge";
    case LossKind::kQuadratic:
      return "quadratic";
    case LossKind::kLogistic:
      return "logistic";
    case LossKind::kExponential:
      return "exponential";
  }
  return "logistic";
}

LossKind parse_loss_kind(const std::string& text) {
  if (text == "hinge") return LossKind::kHinge;
  if (text == "quadratic") return LossKind::kQuadratic;
  if (text == "logistic") return LossKind::kLogistic;
  if (text == "exponential") return LossKind::kExponential;
  throw std::invalid_argument("unknown loss '" + text + "'");
}

OracleValue oracle_eval(LossKind kind, const Eigen::VectorXd& lambda, const Dataset& data,
                        const ClassWeights& weights) {
  if (!lambda.allFinite()) throw std::invalid_argument("coefficients must be finite");
  if (lambda.size() != data.p() + 1) throw std::invalid_argument("coefficient vector has wrong size");
  const Eigen::VectorXd scores = data.X * lambda;
  Eigen::VectorXd slope(data.n());
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double y = data.y(i);
    const double w = weights.scale(data.y(i));
    const double m = y * scores(i);
    double value = 0.0;
    double derivative = 0.0;  // d l / d m
    switch (kind) {
      case LossKind::kHinge:
        value = std::max(0.0, 1.0 - m);
        derivative = m < 1.0 ? -1.0 : 0.0;
        break;
      case LossKind::kQuadratic:
        value = (1.0 - m) * (1.0 - m);
        derivative = -2.0 * (1.0 - m);
        break;
      case LossKind::kLogistic:
        value = softplus_neg(m);
        derivative = -sigmoid_neg(m);
        break;
      case LossKind::kExponential:
        // Clip the exponent so huge negative margins stay finite.
        value = std::exp(std::min(1.0 - m, 700.0));
        derivative = -value;
        break;
    }
    total += w * value;
    slope(i) = w * derivative * y;
  }
  OracleValue out;
  out.value = total / data.n();
  out.gradient = data.X.transpose() * slope / data.n();
  return out;
}

bool CutPool::has_anchor(const Eigen::VectorXd& lambda) const {
  return std::any_of(cuts_.begin(), cuts_.end(), [&](const Cut& c) { return c.anchor == lambda; });
}

double CutPool::model(const Eigen::VectorXd& lambda) const {
  double best = 0.0;
  for (const auto& c : cuts_) best = std::max(best, c.at(lambda));
  return best;
}

std::string BendersTrace::to_csv() const {
  std::ostringstream out;
  out.precision(12);
  out << "k,LB,UB,gap,oracle_seconds,solve_seconds\n";
  for (const auto& it : iterations) {
    out << it.k << "," << it.lower_bound << "," << it.upper_bound << ","
        << it.upper_bound - it.lower_bound << "," << it.oracle_seconds << "," << it.solve_seconds
        << "\n";
  }
  return out.str();
}

double benders_objective(LossKind kind, const ModelSpec& spec, const Dataset& data,
                         const Eigen::VectorXd& lambda) {
  return oracle_eval(kind, lambda, data, spec.weights).value + interpretability_penalty(spec, lambda);
}

BendersResult benders_solve(const Dataset& data, LossKind kind, const ModelSpec& spec,
                            const BendersOptions& opts) {
  if (spec.coefficients.size() != data.p() + 1) {
    throw std::invalid_argument("coefficient sets do not match the dataset");
  }
  const auto start = Clock::now();
  IntegerProgram proxy = build_proxy_program(spec);
  const int theta = proxy.theta;

  BendersResult out;
  out.upper_bound = std::numeric_limits<double>::infinity();
  out.lower_bound = 0.0;
  out.stop_reason = "iterations";
  for (int k = 1; k <= opts.max_iterations; ++k) {
    const double remaining = opts.time_limit - seconds_since(start);
    if (remaining <= 0.0) {
      out.stop_reason = "time";
      break;
    }
    SolveOptions proxy_opts = opts.proxy;
    proxy_opts.time_limit = std::min(proxy_opts.time_limit, remaining);
    if (out.lambda.size() > 0) {
      if (auto x = encode_solution(proxy, data, out.lambda)) proxy_opts.warm_starts.push_back(*x);
    }
    const auto solve_start = Clock::now();
    const SolveResult sr = solve(proxy, proxy_opts);
    const double solve_seconds = seconds_since(solve_start);
    if (!sr.has_incumbent()) {
      if (sr.status == SolveStatus::kInfeasible) {
        throw std::runtime_error("cutting-plane proxy is infeasible: no admissible coefficients");
      }
      out.stop_reason = "time";
      break;
    }
    const Eigen::VectorXd lambda = proxy.decode_lambda(sr.x);
    const bool repeated = out.cuts.has_anchor(lambda);
    // Every dual bound of the proxy is a valid lower bound on min Z.
    out.lower_bound = std::max(out.lower_bound, sr.dual_bound);

    const auto oracle_start = Clock::now();
    const OracleValue ov = oracle_eval(kind, lambda, data, spec.weights);
    const double oracle_seconds = seconds_since(oracle_start);
    const double z = ov.value + interpretability_penalty(spec, lambda);
    if (z < out.upper_bound) {
      out.upper_bound = z;
      out.lambda = lambda;
      out.objective = z;
    }
    out.trace.iterations.push_back(
        {k, lambda, z, out.lower_bound, out.upper_bound, oracle_seconds, solve_seconds});

    if (out.upper_bound - out.lower_bound <= opts.gap_tolerance) {
      out.converged = true;
      out.stop_reason = "gap";
      break;
    }
    if (repeated) {
      // The proxy already evaluated this point exactly; its bound is tight.
      out.converged = true;
      out.stop_reason = "repeated";
      break;
    }
    // theta - g^T lambda >= L - g^T lambda^k
    Constraint cut{"cut_" + std::to_string(k), {{theta, 1.0}}, Sense::kGreaterEqual,
                   ov.value - ov.gradient.dot(lambda)};
    for (int j = 0; j < lambda.size(); ++j) {
      if (ov.gradient(j) != 0.0) cut.terms.emplace_back(proxy.coefficients[j].lambda, -ov.gradient(j));
    }
    proxy.add_constraint(std::move(cut));
    out.cuts.add({lambda, ov.value, ov.gradient});
  }
  return out;
}

}  // namespace slimkit
