#include "slimkit/coefficient_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slimkit {

CoefficientSet::CoefficientSet(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("coefficient values must be finite");
  }
  values_.push_back(0.0);
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
}

CoefficientSet CoefficientSet::integer_range(int lo, int hi) {
  if (lo > 0 || hi < 0) throw std::invalid_argument("integer range must contain 0");
  std::vector<double> v;
  v.reserve(static_cast<size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) v.push_back(k);
  return CoefficientSet(std::move(v));
}

CoefficientSet CoefficientSet::two_significant_digits(int max_exponent) {
  if (max_exponent < 1) throw std::invalid_argument("max_exponent must be at least 1");
  std::vector<double> v;
  for (int e = 1; e <= max_exponent; ++e) {
    const double hi = std::pow(10.0, e);
    const double lo = std::pow(10.0, e - 1);
    for (int d1 = -9; d1 <= 9; ++d1) {
      for (int d2 = -9; d2 <= 9; ++d2) v.push_back(d1 * hi + d2 * lo);
    }
  }
  return CoefficientSet(std::move(v));
}

double CoefficientSet::max_abs() const { return std::max(std::abs(min()), std::abs(max())); }

bool CoefficientSet::is_integer_interval() const {
  for (size_t k = 0; k < values_.size(); ++k) {
    if (values_[k] != std::floor(values_[k])) return false;
    if (k > 0 && values_[k] - values_[k - 1] != 1.0) return false;
  }
  return true;
}

bool CoefficientSet::contains(double v) const {
  return std::binary_search(values_.begin(), values_.end(), v);
}

CoefficientSet CoefficientSet::restrict_sign(SignConstraint sign) const {
  std::vector<double> v;
  for (double x : values_) {
    if (sign == SignConstraint::kNonNegative && x < 0) continue;
    if (sign == SignConstraint::kNonPositive && x > 0) continue;
    v.push_back(x);
  }
  return CoefficientSet(std::move(v));
}

InterpretabilitySet InterpretabilitySet::uniform(int p, const CoefficientSet& intercept,
                                                 const CoefficientSet& coefficient) {
  InterpretabilitySet L;
  L.sets.reserve(static_cast<size_t>(p) + 1);
  L.sets.push_back(intercept);
  for (int j = 1; j <= p; ++j) L.sets.push_back(coefficient);
  return L;
}

double InterpretabilitySet::max_l1_norm() const {
  double total = 0.0;
  for (size_t j = 1; j < sets.size(); ++j) total += sets[j].max_abs();
  return total;
}

std::uint64_t InterpretabilitySet::cardinality() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (const auto& s : sets) {
    const auto k = static_cast<std::uint64_t>(s.size());
    if (total > kMax / k) return kMax;
    total *= k;
  }
  return total;
}

bool InterpretabilitySet::contains(const Eigen::VectorXd& lambda) const {
  if (lambda.size() != size()) return false;
  for (int j = 0; j < size(); ++j) {
    if (!sets[j].contains(lambda(j))) return false;
  }
  return true;
}

}  // namespace slimkit
