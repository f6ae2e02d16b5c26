#include "slimkit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace slimkit {

namespace {

Eigen::MatrixXd features(const Dataset& data) { return data.X.rightCols(data.p()); }

void check_rho(const Eigen::VectorXd& rho, const Dataset& data) {
  if (rho.size() != data.p()) {
    throw std::invalid_argument("reference coefficients need one entry per feature");
  }
  if (!rho.allFinite()) throw std::invalid_argument("reference coefficients must be finite");
  if (rho.norm() == 0.0) throw std::invalid_argument("reference coefficients are all zero");
}

ResolutionBound resolution(double gamma, double x_max, int p) {
  ResolutionBound out;
  out.gamma = gamma;
  out.x_max = x_max;
  if (gamma <= 0.0) {
    out.zero_margin = true;
    return out;
  }
  out.bound = x_max * std::sqrt(static_cast<double>(p)) / (2.0 * gamma);
  out.lambda = static_cast<long long>(std::floor(out.bound)) + 1;
  return out;
}

BigInt power(long long base, int exponent) {
  BigInt out = 1;
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

// Moebius function for 1..n by sieve.
std::vector<int> moebius(long long n) {
  std::vector<int> mu(static_cast<size_t>(n) + 1, 1);
  std::vector<bool> composite(static_cast<size_t>(n) + 1, false);
  for (long long i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    for (long long j = i; j <= n; j += i) {
      if (j > i) composite[j] = true;
      mu[j] = -mu[j];
    }
    for (long long j = i * i; j <= n; j += i * i) mu[j] = 0;
  }
  return mu;
}

void check_count_args(int p, long long lambda) {
  if (p < 1) throw std::invalid_argument("dimension must be at least 1");
  if (lambda < 1) throw std::invalid_argument("resolution must be at least 1");
}

}  // namespace

MarginProfile margin_profile(const Eigen::VectorXd& rho, const Dataset& data) {
  check_rho(rho, data);
  const Eigen::MatrixXd x = features(data);
  const Eigen::VectorXd margins = (x * rho).cwiseAbs() / rho.norm();
  MarginProfile out;
  out.order.resize(static_cast<size_t>(data.n()));
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int a, int b) { return margins(a) < margins(b); });
  for (int i : out.order) out.margins.push_back(margins(i));
  for (int i = 0; i < data.n(); ++i) out.norms.push_back(x.row(i).norm());
  return out;
}

ResolutionBound min_margin_lambda(const Eigen::VectorXd& rho, const Dataset& data) {
  return kth_margin_lambda(rho, data, 1);
}

ResolutionBound kth_margin_lambda(const Eigen::VectorXd& rho, const Dataset& data, int k) {
  if (k < 1 || k > data.n()) throw std::invalid_argument("k must lie in [1, N]");
  const MarginProfile profile = margin_profile(rho, data);
  // Drop the k-1 smallest margins; the rest keep their sign after rounding.
  double x_max = 0.0;
  for (size_t r = static_cast<size_t>(k) - 1; r < profile.order.size(); ++r) {
    x_max = std::max(x_max, profile.norms[profile.order[r]]);
  }
  ResolutionBound out = resolution(profile.margins[k - 1], x_max, data.p());
  out.degenerate = k == data.n();
  return out;
}

Eigen::VectorXd round_to_grid(const Eigen::VectorXd& rho, long long lambda) {
  if (lambda < 1) throw std::invalid_argument("resolution must be at least 1");
  const double norm = rho.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("reference coefficients are all zero");
  Eigen::VectorXd out(rho.size());
  for (Eigen::Index j = 0; j < rho.size(); ++j) {
    out(j) = std::round(static_cast<double>(lambda) * rho(j) / norm);
  }
  return out;
}

int zero_one_mistakes(const Eigen::VectorXd& coef, const Dataset& data) {
  if (coef.size() != data.p()) throw std::invalid_argument("coefficients need one entry per feature");
  const Eigen::VectorXd scores = features(data) * coef;
  int mistakes = 0;
  for (int i = 0; i < data.n(); ++i) mistakes += data.y(i) * scores(i) <= 0.0;
  return mistakes;
}

double log_big(const BigInt& n) {
  if (n <= 0) throw std::invalid_argument("logarithm of a non-positive count");
  const unsigned bits = boost::multiprecision::msb(n);
  if (bits < 1000) return std::log(n.convert_to<double>());
  const unsigned shift = bits - 60;
  const BigInt top = n >> shift;
  return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

double occam_gap(const BigInt& hypothesis_count, long long n, double delta) {
  if (hypothesis_count < 1) throw std::invalid_argument("hypothesis count must be at least 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (n < 1) throw std::invalid_argument("N must be at least 1");
  return std::sqrt((log_big(hypothesis_count) - std::log(delta)) / (2.0 * static_cast<double>(n)));
}

BigInt l0_hypothesis_count(int p, long long lambda, double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("C0 must be positive");
  if (p < 0 || lambda < 0) throw std::invalid_argument("dimension and resolution must be non-negative");
  const double inv = 1.0 / c0;
  const long long cap = inv >= p ? p : static_cast<long long>(std::floor(inv + 1e-9));
  const long long kmax = std::min<long long>(p, cap);
  BigInt total = 0;
  BigInt choose = 1;  // C(p, k)
  BigInt signs = 1;   // (2 lambda)^k
  for (long long k = 0; k <= kmax; ++k) {
    total += choose * signs;
    choose = choose * (p - k) / (k + 1);
    signs *= 2 * lambda;
  }
  return total;
}

BigInt coprime_count(int p, long long lambda) {
  check_count_args(p, lambda);
  const std::vector<int> mu = moebius(lambda);
  BigInt total = 0;
  for (long long d = 1; d <= lambda; ++d) {
    if (mu[d] == 0) continue;
    const BigInt multiples = power(2 * (lambda / d) + 1, p) - 1;  // nonzero vectors divisible by d
    if (mu[d] > 0) {
      total += multiples;
    } else {
      total -= multiples;
    }
  }
  return total;
}

std::uint64_t coprime_count_enumerated(int p, long long lambda, std::uint64_t cap) {
  check_count_args(p, lambda);
  const BigInt size = power(2 * lambda + 1, p);
  if (size > cap) {
    throw std::length_error("coprime enumeration of " + size.str() + " vectors exceeds the cap");
  }
  std::vector<long long> v(static_cast<size_t>(p), -lambda);
  std::uint64_t count = 0;
  while (true) {
    long long g = 0;
    for (long long c : v) g = std::gcd(g, c < 0 ? -c : c);
    count += g == 1;
    int j = p - 1;
    while (j >= 0 && v[j] == lambda) v[j--] = -lambda;
    if (j < 0) break;
    ++v[j];
  }
  return count;
}

double coprime_density(int p, long long lambda) {
  return std::exp(log_big(coprime_count(p, lambda)) - p * std::log(2.0 * lambda + 1.0));
}

BigInt farey_count(int p, long long lambda) {
  check_count_args(p, lambda);
  const std::vector<int> mu = moebius(lambda);
  BigInt total = 0;
  for (long long q = 1; q <= lambda; ++q) {
    // J_P(q) = sum_{d | q} mu(d) (q / d)^P
    for (long long d = 1; d <= q; ++d) {
      if (q % d != 0 || mu[d] == 0) continue;
      const BigInt term = power(q / d, p);
      if (mu[d] > 0) {
        total += term;
      } else {
        total -= term;
      }
    }
  }
  return total;
}

std::string density_csv(const std::vector<int>& ps, const std::vector<long long>& lambdas,
                        double delta, long long n) {
  std::ostringstream out;
  out.precision(10);
  out << "P,Lambda,count,density,full_gap,coprime_gap,gap_improvement\n";
  for (int p : ps) {
    for (long long lambda : lambdas) {
      const BigInt count = coprime_count(p, lambda);
      const double full = occam_gap(power(2 * lambda + 1, p), n, delta);
      const double coprime = occam_gap(count, n, delta);
      out << p << "," << lambda << "," << count.str() << "," << coprime_density(p, lambda) << ","
          << full << "," << coprime << "," << full - coprime << "\n";
    }
  }
  return out.str();
}

}  // namespace slimkit
