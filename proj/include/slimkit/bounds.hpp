#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "slimkit/dataset.hpp"

namespace slimkit {

using BigInt = boost::multiprecision::cpp_int;

// The discretization bounds work on classifiers without an intercept: rho
// has one entry per feature and examples are the non-intercept columns.

/// Normalized margins |rho^T x_i| / ||rho||_2 in increasing order, with the
/// example index of each.
struct MarginProfile {
  std::vector<double> margins;
  std::vector<int> order;  // order[k] = example with the (k+1)-th smallest margin
  std::vector<double> norms;  // ||x_i||_2 by example index
};

MarginProfile margin_profile(const Eigen::VectorXd& rho, const Dataset& data);

struct ResolutionBound {
  long long lambda = 0;  // smallest integer strictly above `bound`
  double bound = 0.0;    // x_max * sqrt(P) / (2 * gamma)
  double gamma = 0.0;
  double x_max = 0.0;
  bool zero_margin = false;  // gamma == 0: no finite resolution works
  bool degenerate = false;   // the bound rests on a single example
};

/// Resolution that keeps the sign of every example under rounding.
ResolutionBound min_margin_lambda(const Eigen::VectorXd& rho, const Dataset& data);

/// Resolution that keeps the sign of all but the k-1 smallest-margin
/// examples, so rounding costs at most k-1 extra mistakes. k = 1 is
/// min_margin_lambda. Throws unless 1 <= k <= N.
ResolutionBound kth_margin_lambda(const Eigen::VectorXd& rho, const Dataset& data, int k);

/// lambda_j = round(Lambda * rho_j / ||rho||_2), ties away from zero.
Eigen::VectorXd round_to_grid(const Eigen::VectorXd& rho, long long lambda);

/// Number of examples with y_i * coef^T x_i <= 0 (non-intercept columns).
int zero_one_mistakes(const Eigen::VectorXd& coef, const Dataset& data);

/// Natural log of a positive big integer.
double log_big(const BigInt& n);

/// sqrt((log |H| - log delta) / (2N)).
double occam_gap(const BigInt& hypothesis_count, long long n, double delta);

/// |{lambda in (Z cap [-Lambda, Lambda])^P : ||lambda||_0 <= floor(1 / C0)}|.
BigInt l0_hypothesis_count(int p, long long lambda, double c0);

/// Vectors in (Z cap [-Lambda, Lambda])^P \ {0} whose absolute values have gcd 1,
/// by Moebius inclusion-exclusion over the common divisor.
BigInt coprime_count(int p, long long lambda);

/// Same count by direct enumeration; throws when (2 Lambda + 1)^P exceeds `cap`.
std::uint64_t coprime_count_enumerated(int p, long long lambda, std::uint64_t cap = 100000000);

/// coprime_count / (2 Lambda + 1)^P.
double coprime_density(int p, long long lambda);

/// Farey points of level Lambda in [0,1)^P: pairs (v, q), 1 <= q <= Lambda,
/// 0 <= v_j < q, gcd(v, q) = 1; the sum of Jordan totients J_P(q).
BigInt farey_count(int p, long long lambda);

/// Rows P,Lambda,count,density,full_gap,coprime_gap,gap_improvement for
/// every P in ps and Lambda in lambdas, at confidence delta and N examples.
std::string density_csv(const std::vector<int>& ps, const std::vector<long long>& lambdas,
                        double delta, long long n);

}  // namespace slimkit
