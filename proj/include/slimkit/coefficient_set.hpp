#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace slimkit {

enum class SignConstraint { kFree, kNonNegative, kNonPositive };

/// Finite, sorted, duplicate-free list of admissible values for one
/// coefficient. Always contains 0.
class CoefficientSet {
 public:
  CoefficientSet() : values_{0.0} {}
  explicit CoefficientSet(std::vector<double> values);

  /// Z intersected with [lo, hi]; requires lo <= 0 <= hi.
  static CoefficientSet integer_range(int lo, int hi);
  static CoefficientSet symmetric(int bound) { return integer_range(-bound, bound); }

  /// Values d1 * 10^e + d2 * 10^(e-1) with digits in {0, +-1, ..., +-9} and
  /// e in [1, max_exponent]: every integer with at most two significant digits
  /// up to 99 * 10^(max_exponent - 1).
  static CoefficientSet two_significant_digits(int max_exponent = 3);

  const std::vector<double>& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }
  double max_abs() const;

  /// True when the set is every integer in [min(), max()].
  bool is_integer_interval() const;
  bool contains(double v) const;

  CoefficientSet restrict_sign(SignConstraint sign) const;

  /// max over the set of value * a.
  double max_product(double a) const { return std::max(min() * a, max() * a); }

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;

 private:
  std::vector<double> values_;
};

/// Component-wise admissible sets: sets[0] is the intercept.
struct InterpretabilitySet {
  std::vector<CoefficientSet> sets;

  static InterpretabilitySet uniform(int p, const CoefficientSet& intercept,
                                     const CoefficientSet& coefficient);

  int size() const { return static_cast<int>(sets.size()); }
  const CoefficientSet& operator[](int j) const { return sets[j]; }
  CoefficientSet& operator[](int j) { return sets[j]; }

  /// max ||lambda_{1..P}||_1 over the set.
  double max_l1_norm() const;

  /// Product of set sizes, saturating at UINT64_MAX.
  std::uint64_t cardinality() const;

  bool contains(const Eigen::VectorXd& lambda) const;
};

}  // namespace slimkit
