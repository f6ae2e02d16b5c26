#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "slimkit/dataset.hpp"
#include "slimkit/integer_program.hpp"
#include "slimkit/model_spec.hpp"

namespace slimkit {

struct BruteForceResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> argmin;  // every optimal coefficient vector, enumeration order
  std::uint64_t evaluated = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Exhaustive minimization of the directly evaluated objective over every
/// coefficient vector in spec.coefficients, operational constraints checked
/// directly. Vectors within `tol` of the minimum form the argmin set. Throws
/// std::length_error when the set has more than `cap` elements.
BruteForceResult brute_force(const ModelSpec& spec, const Dataset& data,
                             std::uint64_t cap = kDefaultEnumerationCap, double tol = 1e-9);

/// Same, using the ModelSpec carried by a built program.
BruteForceResult brute_force(const IntegerProgram& ip, const Dataset& data,
                             std::uint64_t cap = kDefaultEnumerationCap, double tol = 1e-9);

/// Calls `visit` on every vector of L in odometer order (last index fastest).
template <typename Visit>
void enumerate(const InterpretabilitySet& L, Visit&& visit) {
  const int k = L.size();
  std::vector<int> at(static_cast<size_t>(k), 0);
  Eigen::VectorXd lambda(k);
  for (int j = 0; j < k; ++j) lambda(j) = L[j].values()[0];
  while (true) {
    visit(static_cast<const Eigen::VectorXd&>(lambda));
    int j = k - 1;
    while (j >= 0 && at[j] + 1 == L[j].size()) {
      at[j] = 0;
      lambda(j) = L[j].values()[0];
      --j;
    }
    if (j < 0) return;
    ++at[j];
    lambda(j) = L[j].values()[at[j]];
  }
}

}  // namespace slimkit
