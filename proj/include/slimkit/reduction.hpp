#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slimkit/dataset.hpp"
#include "slimkit/model_spec.hpp"

namespace slimkit {

enum class ProxyKind {
  kRelaxation,  // LP relaxation of the Big-M program
  kHinge,       // weighted hinge loss plus the relaxed penalty
};

std::string to_string(ProxyKind kind);
ProxyKind parse_proxy_kind(const std::string& text);

struct ReductionConfig {
  ProxyKind proxy = ProxyKind::kRelaxation;
  double level_set_width = 0.0;  // epsilon >= 0
  double strict_margin = 1e-4;   // stands in for the strict side of a flipped inequality
  double tolerance = 1e-7;       // removal needs variant > proxy + epsilon + tolerance
  int iteration_limit = 1000000;
  // Removing an example every level-set classifier gets right can let a
  // classifier outside the level set overtake the optimum on the reduced data,
  // so by default only examples fixed in the error state are removed.
  bool remove_fixed_correct = false;
};

/// Proxy solution plus, for every example, the proxy optimum when that
/// example is forced to the opposite loss state and to the opposite predicted
/// label. Independent of the level-set width.
struct ReductionProfile {
  double proxy_objective = 0.0;
  Eigen::VectorXd proxy_lambda;
  std::vector<int> fixed_label;      // prediction of the proxy: +1 iff score > 0
  std::vector<bool> fixed_correct;   // proxy classifies i correctly at the margin
  std::vector<double> loss_variant;  // +inf when the flipped region is empty
  std::vector<double> label_variant;

  /// Smaller of the two variants: the example is fixed only if both exceed the bound.
  double variant(int i) const { return std::min(loss_variant[i], label_variant[i]); }
};

struct ReductionResult {
  Dataset reduced;
  ModelSpec reduced_spec;  // loss_scale keeps the full-data normalization
  std::vector<int> kept;
  std::vector<int> removed;
  std::vector<int> removed_labels;  // fixed prediction of each removed example
  std::vector<bool> removed_correct;
  double proxy_objective = 0.0;
  double level_set_width = 0.0;
  ReductionProfile profile;

  /// Header index,label,fixed_label,fixed_correct,variant_objective,removed,infeasible_variant.
  std::string to_csv(const Dataset& data) const;
};

ReductionProfile reduction_profile(const Dataset& data, const ModelSpec& spec,
                                   const ReductionConfig& config = {});

/// Removes every example whose variant optimum exceeds proxy + width
/// (restricted to fixed-error examples unless remove_fixed_correct is set).
ReductionResult apply_level_set(const ReductionProfile& profile, const Dataset& data,
                                const ModelSpec& spec, double width,
                                bool remove_fixed_correct = false, double tolerance = 1e-7);

ReductionResult reduce(const Dataset& data, const ModelSpec& spec, const ReductionConfig& config);

/// Proxy objective with the coefficients fixed at lambda; +inf when that
/// point is outside the proxy's feasible region.
double proxy_objective_at(const Dataset& data, const ModelSpec& spec, ProxyKind kind,
                          const Eigen::VectorXd& lambda);

/// Level-set width Z(f_hat) - Z(f_tilde*) from a feasible objective and the
/// relaxation optimum. Throws when the feasible value is below the relaxation.
double epsilon_from_feasible(double feasible_objective, double relaxation_objective);

struct LevelSetCertificate {
  double lipschitz = 0.0;
  double radius = 0.0;
  double c_lambda = 0.0;
  double c_psi = 0.0;
};

struct CertificateCheck {
  bool satisfied = false;
  double epsilon = 0.0;  // lipschitz * c_lambda
  std::string violated;  // empty when satisfied
};

/// Satisfied iff c_psi > 2 * lipschitz * c_lambda. Throws on non-positive constants.
CertificateCheck check_level_set_certificate(const LevelSetCertificate& cert);

}  // namespace slimkit
