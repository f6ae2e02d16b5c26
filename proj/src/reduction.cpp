#include "slimkit/reduction.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "slimkit/formulation.hpp"
#include "slimkit/integer_program.hpp"
#include "slimkit/lp/dual_simplex.hpp"

namespace slimkit {

namespace {

constexpr double kNoBound = std::numeric_limits<double>::infinity();
using lp::LpStatus;
using Lp = lp::DualSimplex<double>;

// Relaxed program with one free row per example holding its score lambda^T x_i.
struct ProxyLp {
  std::unique_ptr<Lp> lp;
  int score_row0 = 0;
  std::vector<int> lambda_cols;
};

ProxyLp make_proxy_lp(const Dataset& data, const ModelSpec& spec, ProxyKind kind) {
  if (spec.ops.has_rate_constraints()) {
    throw std::invalid_argument("data reduction does not support rate constraints");
  }
  IntegerProgram ip = build_program(data, spec);
  if (kind == ProxyKind::kHinge) {
    // xi_i >= 1 - y_i lambda^T x_i replaces the indicator loss.
    for (int i = 0; i < data.n(); ++i) {
      const int psi = ip.loss_vars[i];
      const double cost = ip.objective()[psi];
      ip.set_objective(psi, 0.0);
      const int xi = ip.add_variable({"xi_" + std::to_string(i), VarKind::kContinuous, 0.0, kNoBound,
                                      VarRole::kProxyLoss, 0},
                                     cost);
      Constraint row{"hinge_" + std::to_string(i), {{xi, 1.0}}, Sense::kGreaterEqual, 1.0};
      for (int j = 0; j <= data.p(); ++j) {
        const double a = data.y(i) * data.X(i, j);
        if (a != 0.0) row.terms.emplace_back(ip.coefficients[j].lambda, a);
      }
      ip.add_constraint(std::move(row));
    }
  }
  std::vector<lp::LpEntry> entries;
  std::vector<double> row_lo, row_hi;
  for (int r = 0; r < ip.num_constraints(); ++r) {
    const auto& c = ip.constraint(r);
    for (const auto& [k, a] : c.terms) {
      if (a != 0.0) entries.push_back({r, k, a});
    }
    row_lo.push_back(c.sense == Sense::kLessEqual ? -kNoBound : c.rhs);
    row_hi.push_back(c.sense == Sense::kGreaterEqual ? kNoBound : c.rhs);
  }
  ProxyLp out;
  out.score_row0 = ip.num_constraints();
  for (const auto& enc : ip.coefficients) out.lambda_cols.push_back(enc.lambda);
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j <= data.p(); ++j) {
      if (data.X(i, j) != 0.0) entries.push_back({out.score_row0 + i, out.lambda_cols[j], data.X(i, j)});
    }
    row_lo.push_back(-kNoBound);
    row_hi.push_back(kNoBound);
  }
  std::vector<double> lo, hi;
  for (const auto& v : ip.variables()) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
  }
  out.lp = std::make_unique<Lp>(static_cast<int>(row_lo.size()), ip.num_variables(), entries, lo, hi,
                                row_lo, row_hi, ip.objective());
  return out;
}

// Proxy optimum over {score_i in [lo, hi]}; +inf when that region is empty.
double variant_objective(ProxyLp& proxy, int i, double lo, double hi, const ReductionConfig& config) {
  Lp& lp = *proxy.lp;
  const int row = proxy.score_row0 + i;
  lp.set_row_bounds(row, lo, hi);
  lp::LpOptions opts;
  opts.iteration_limit = config.iteration_limit;
  LpStatus status = lp.solve(opts);
  double value = kNoBound;
  if (status == LpStatus::kOptimal) {
    value = lp.objective();
  } else if (status != LpStatus::kInfeasible) {
    lp.set_row_bounds(row, -kNoBound, kNoBound);
    throw std::runtime_error("reduction variant LP for example " + std::to_string(i) +
                             " did not solve");
  }
  lp.set_row_bounds(row, -kNoBound, kNoBound);
  return value;
}

}  // namespace

double proxy_objective_at(const Dataset& data, const ModelSpec& spec, ProxyKind kind,
                          const Eigen::VectorXd& lambda) {
  ProxyLp proxy = make_proxy_lp(data, spec, kind);
  if (lambda.size() != static_cast<Eigen::Index>(proxy.lambda_cols.size())) {
    throw std::invalid_argument("coefficient vector has wrong size");
  }
  for (size_t j = 0; j < proxy.lambda_cols.size(); ++j) {
    const int c = proxy.lambda_cols[j];
    if (lambda(j) < proxy.lp->col_lower(c) || lambda(j) > proxy.lp->col_upper(c)) return kNoBound;
    proxy.lp->set_col_bounds(c, lambda(j), lambda(j));
  }
  const LpStatus status = proxy.lp->solve();
  if (status == LpStatus::kInfeasible) return kNoBound;
  if (status != LpStatus::kOptimal) throw std::runtime_error("proxy LP did not solve");
  return proxy.lp->objective();
}

std::string to_string(ProxyKind kind) {
  return kind == ProxyKind::kHinge ? "hinge" : "relaxation";
}

ProxyKind parse_proxy_kind(const std::string& text) {
  if (text == "relaxation") return ProxyKind::kRelaxation;
  if (text == "hinge") return ProxyKind::kHinge;
  throw std::invalid_argument("unknown reduction proxy '" + text + "'");
}

ReductionProfile reduction_profile(const Dataset& data, const ModelSpec& spec,
                                   const ReductionConfig& config) {
  if (!(config.strict_margin > 0.0)) throw std::invalid_argument("strict margin must be positive");
  ProxyLp proxy = make_proxy_lp(data, spec, config.proxy);
  Lp& lp = *proxy.lp;
  lp::LpOptions opts;
  opts.iteration_limit = config.iteration_limit;
  const LpStatus status = lp.solve(opts);
  if (status != LpStatus::kOptimal) {
    throw std::runtime_error("reduction proxy did not solve to optimality");
  }
  ReductionProfile out;
  out.proxy_objective = lp.objective();
  out.proxy_lambda.resize(static_cast<Eigen::Index>(proxy.lambda_cols.size()));
  for (size_t j = 0; j < proxy.lambda_cols.size(); ++j) out.proxy_lambda(j) = lp.value(proxy.lambda_cols[j]);

  const double g = spec.margin;
  const double strict = config.strict_margin;
  const double tol = config.tolerance;
  const int n = data.n();
  out.fixed_label.resize(n);
  out.fixed_correct.resize(n);
  out.loss_variant.resize(n);
  out.label_variant.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = lp.row_activity(proxy.score_row0 + i);
    const int y = data.y(i);
    const double ys = y * s;
    // Loss state of the proxy and the region holding the opposite state, in
    // terms of y * score: correct is ys >= g (g > 0) or ys > 0 (g <= 0).
    const bool correct = g > 0.0 ? ys >= g - tol : ys > tol;
    double ys_lo, ys_hi;
    if (correct) {
      ys_lo = -kNoBound;
      ys_hi = g > 0.0 ? g - strict : 0.0;
    } else {
      ys_lo = g > 0.0 ? g : strict;
      ys_hi = kNoBound;
    }
    const double lo = y > 0 ? ys_lo : -ys_hi;
    const double hi = y > 0 ? ys_hi : -ys_lo;
    out.fixed_correct[i] = correct;
    out.loss_variant[i] = variant_objective(proxy, i, lo, hi, config);

    const int label = s > tol ? 1 : -1;
    out.fixed_label[i] = label;
    out.label_variant[i] = label > 0 ? variant_objective(proxy, i, -kNoBound, 0.0, config)
                                     : variant_objective(proxy, i, strict, kNoBound, config);
  }
  return out;
}

ReductionResult apply_level_set(const ReductionProfile& profile, const Dataset& data,
                                const ModelSpec& spec, double width, bool remove_fixed_correct,
                                double tolerance) {
  if (!(width >= 0.0)) throw std::invalid_argument("level-set width must be non-negative");
  ReductionResult out;
  out.profile = profile;
  out.proxy_objective = profile.proxy_objective;
  out.level_set_width = width;
  const double bound = profile.proxy_objective + width + tolerance;
  for (int i = 0; i < data.n(); ++i) {
    if (profile.variant(i) > bound && (remove_fixed_correct || !profile.fixed_correct[i])) {
      out.removed.push_back(i);
      out.removed_labels.push_back(profile.fixed_label[i]);
      out.removed_correct.push_back(profile.fixed_correct[i]);
    } else {
      out.kept.push_back(i);
    }
  }
  out.reduced = data.subset(out.kept);
  out.reduced_spec = spec;
  out.reduced_spec.loss_scale =
      spec.loss_scale * static_cast<double>(out.kept.size()) / static_cast<double>(data.n());
  return out;
}

ReductionResult reduce(const Dataset& data, const ModelSpec& spec, const ReductionConfig& config) {
  return apply_level_set(reduction_profile(data, spec, config), data, spec, config.level_set_width,
                         config.remove_fixed_correct, config.tolerance);
}

std::string ReductionResult::to_csv(const Dataset& data) const {
  std::ostringstream out;
  out.precision(12);
  out << "index,label,fixed_label,fixed_correct,variant_objective,removed,infeasible_variant\n";
  size_t r = 0;
  for (int i = 0; i < data.n(); ++i) {
    const bool is_removed = r < removed.size() && removed[r] == i;
    if (is_removed) ++r;
    const double v = profile.variant(i);
    out << i << "," << data.y(i) << "," << profile.fixed_label[i] << ","
        << (profile.fixed_correct[i] ? 1 : 0) << ",";
    if (std::isfinite(v)) {
      out << v;
    } else {
      out << "inf";
    }
    out << "," << (is_removed ? 1 : 0) << "," << (std::isfinite(v) ? 0 : 1) << "\n";
  }
  return out.str();
}

double epsilon_from_feasible(double feasible_objective, double relaxation_objective) {
  const double diff = feasible_objective - relaxation_objective;
  if (diff < -1e-9 * std::max(1.0, std::abs(relaxation_objective))) {
    throw std::invalid_argument("feasible objective lies below the relaxation optimum");
  }
  return std::max(0.0, diff);
}

CertificateCheck check_level_set_certificate(const LevelSetCertificate& cert) {
  if (!(cert.lipschitz > 0.0) || !(cert.radius > 0.0) || !(cert.c_lambda > 0.0) ||
      !(cert.c_psi > 0.0)) {
    throw std::invalid_argument("level-set certificate constants must be positive");
  }
  CertificateCheck out;
  out.epsilon = cert.lipschitz * cert.c_lambda;
  out.satisfied = cert.c_psi > 2.0 * out.epsilon;
  if (!out.satisfied) out.violated = "c_psi > 2 * lipschitz * c_lambda";
  return out;
}

}  // namespace slimkit
