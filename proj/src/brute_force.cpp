#include "slimkit/brute_force.hpp"

#include <cmath>
#include <stdexcept>

namespace slimkit {

BruteForceResult brute_force(const ModelSpec& spec, const Dataset& data, std::uint64_t cap,
                             double tol) {
  const std::uint64_t size = spec.coefficients.cardinality();
  if (size > cap) {
    throw std::length_error("enumeration of " + std::to_string(size) +
                            " coefficient vectors exceeds the cap of " + std::to_string(cap));
  }
  BruteForceResult out;
  enumerate(spec.coefficients, [&](const Eigen::VectorXd& lambda) {
    ++out.evaluated;
    const Evaluation e = evaluate(spec, data, lambda);
    if (!e.feasible) return;
    out.feasible = true;
    if (e.objective < out.objective - tol) {
      out.objective = e.objective;
      out.argmin.clear();
      out.argmin.push_back(lambda);
    } else if (std::abs(e.objective - out.objective) <= tol) {
      out.argmin.push_back(lambda);
      out.objective = std::min(out.objective, e.objective);
    }
  });
  // A later, slightly smaller optimum can leave earlier members just outside tol.
  std::erase_if(out.argmin, [&](const Eigen::VectorXd& lambda) {
    return evaluate(spec, data, lambda).objective > out.objective + tol;
  });
  return out;
}

BruteForceResult brute_force(const IntegerProgram& ip, const Dataset& data, std::uint64_t cap,
                             double tol) {
  if (!ip.spec) throw std::invalid_argument("program carries no ModelSpec");
  return brute_force(*ip.spec, data, cap, tol);
}

}  // namespace slimkit
