#include "slimkit/integer_program.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slimkit {

std::string to_string(VarRole role) {
  switch (role) {
    case VarRole::kCoefficient:
      return "lambda";
    case VarRole::kLoss:
      return "psi";
    case VarRole::kPenalty:
      return "phi";
    case VarRole::kSelection:
      return "alpha";
    case VarRole::kMagnitude:
      return "beta";
    case VarRole::kLevelSelector:
      return "u";
    case VarRole::kFeatureUse:
      return "nu";
    case VarRole::kRulesPerFeature:
      return "tau";
    case VarRole::kSignAgreement:
      return "delta";
    case VarRole::kPrediction:
      return "z";
    case VarRole::kProxyLoss:
      return "theta";
    case VarRole::kOther:
      return "other";
  }
  return "other";
}

int IntegerProgram::add_variable(Variable v, double objective) {
  if (v.lower > v.upper) {
    throw std::invalid_argument("variable " + v.name + " has lower bound above upper bound");
  }
  if (v.kind == VarKind::kBinary) {
    v.lower = std::max(v.lower, 0.0);
    v.upper = std::min(v.upper, 1.0);
  }
  vars_.push_back(std::move(v));
  objective_.push_back(objective);
  return static_cast<int>(vars_.size()) - 1;
}

int IntegerProgram::add_constraint(Constraint c) {
  for (const auto& [k, a] : c.terms) {
    if (k < 0 || k >= num_variables()) {
      throw std::invalid_argument("constraint " + c.name + " references undeclared variable");
    }
    if (!std::isfinite(a)) throw std::invalid_argument("constraint " + c.name + " has non-finite coefficient");
  }
  cons_.push_back(std::move(c));
  return static_cast<int>(cons_.size()) - 1;
}

double IntegerProgram::objective_value(const std::vector<double>& x) const {
  double total = 0.0;
  for (int k = 0; k < num_variables(); ++k) total += objective_[k] * x[k];
  return total;
}

double IntegerProgram::max_violation(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != num_variables()) return kInf;
  double worst = 0.0;
  for (int k = 0; k < num_variables(); ++k) {
    const auto& v = vars_[k];
    worst = std::max(worst, v.lower - x[k]);
    worst = std::max(worst, x[k] - v.upper);
    if (v.is_integral()) worst = std::max(worst, std::abs(x[k] - std::round(x[k])));
  }
  for (const auto& c : cons_) {
    double lhs = 0.0;
    for (const auto& [k, a] : c.terms) lhs += a * x[k];
    switch (c.sense) {
      case Sense::kLessEqual:
        worst = std::max(worst, lhs - c.rhs);
        break;
      case Sense::kGreaterEqual:
        worst = std::max(worst, c.rhs - lhs);
        break;
      case Sense::kEqual:
        worst = std::max(worst, std::abs(lhs - c.rhs));
        break;
    }
  }
  return worst;
}

Eigen::VectorXd IntegerProgram::decode_lambda(const std::vector<double>& x) const {
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(coefficients.size()));
  for (size_t j = 0; j < coefficients.size(); ++j) {
    const auto& enc = coefficients[j];
    if (!enc.selectors.empty()) {
      double value = 0.0;
      for (const auto& [u, v] : enc.selectors) value += v * std::round(x[u]);
      lambda(j) = value;
    } else if (enc.lambda >= 0) {
      const double raw = x[enc.lambda];
      lambda(j) = vars_[enc.lambda].is_integral() ? std::round(raw) : raw;
    }
    if (lambda(j) == 0.0) lambda(j) = 0.0;  // no negative zero
  }
  return lambda;
}

namespace {

void write_bound(std::ostringstream& out, double v) {
  if (v == kInf) {
    out << "+inf";
  } else if (v == -kInf) {
    out << "-inf";
  } else {
    out << v;
  }
}

void write_terms(std::ostringstream& out, const std::vector<std::pair<int, double>>& terms,
                 const std::vector<Variable>& vars) {
  bool first = true;
  for (const auto& [k, a] : terms) {
    if (a == 0.0) continue;
    out << (a < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    if (std::abs(a) != 1.0) out << std::abs(a) << " ";
    out << vars[k].name;
    first = false;
  }
  if (first) out << "0";
}

}  // namespace

std::string IntegerProgram::to_lp_format() const {
  std::ostringstream out;
  out.precision(17);
  out << "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj;
  for (int k = 0; k < num_variables(); ++k) {
    if (objective_[k] != 0.0) obj.emplace_back(k, objective_[k]);
  }
  write_terms(out, obj, vars_);
  out << "\nSubject To\n";
  for (size_t r = 0; r < cons_.size(); ++r) {
    const auto& c = cons_[r];
    out << " " << (c.name.empty() ? "c" + std::to_string(r) : c.name) << ": ";
    write_terms(out, c.terms, vars_);
    out << (c.sense == Sense::kLessEqual ? " <= " : c.sense == Sense::kGreaterEqual ? " >= " : " = ")
        << c.rhs << "\n";
  }
  out << "Bounds\n";
  for (const auto& v : vars_) {
    if (v.kind == VarKind::kBinary) continue;
    out << " ";
    write_bound(out, v.lower);
    out << " <= " << v.name << " <= ";
    write_bound(out, v.upper);
    out << "\n";
  }
  out << "General\n";
  for (const auto& v : vars_) {
    if (v.kind == VarKind::kInteger) out << " " << v.name << "\n";
  }
  out << "Binary\n";
  for (const auto& v : vars_) {
    if (v.kind == VarKind::kBinary) out << " " << v.name << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace slimkit
