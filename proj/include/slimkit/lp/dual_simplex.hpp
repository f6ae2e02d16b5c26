#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace slimkit::lp {

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kCutoff,  // objective provably above the cutoff
  kIterationLimit,
  kTimeLimit,
  kUnbounded,
  kNumericalFailure,
};

struct LpOptions {
  long iteration_limit = 10'000'000;
  double cutoff = std::numeric_limits<double>::infinity();
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
};

struct LpEntry {
  int row;
  int col;
  double value;
};

/// Bounded-variable dual simplex for
///
///   min c^T x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
///
/// Rows get logical variables s = -A x, so the basis starts as the identity
/// and every bound change leaves the current basis dual feasible: after
/// set_col_bounds / set_row_bounds the next solve() continues from the old
/// basis. The basis inverse is dense, updated by rank-1 pivots and rebuilt
/// periodically through the Schur complement of its structural block.
template <typename Scalar>
class DualSimplex {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DualSimplex(int rows, int cols, const std::vector<LpEntry>& entries,
              const std::vector<double>& col_lower, const std::vector<double>& col_upper,
              const std::vector<double>& row_lower, const std::vector<double>& row_upper,
              const std::vector<double>& cost)
      : m_(rows), n_(cols) {
    if (static_cast<int>(col_lower.size()) != n_ || static_cast<int>(col_upper.size()) != n_ ||
        static_cast<int>(cost.size()) != n_ || static_cast<int>(row_lower.size()) != m_ ||
        static_cast<int>(row_upper.size()) != m_) {
      throw std::invalid_argument("LP dimensions do not match");
    }
    std::vector<int> count(static_cast<size_t>(n_) + 1, 0);
    for (const auto& e : entries) {
      if (e.row < 0 || e.row >= m_ || e.col < 0 || e.col >= n_) {
        throw std::invalid_argument("LP entry out of range");
      }
      ++count[e.col + 1];
    }
    for (int j = 0; j < n_; ++j) count[j + 1] += count[j];
    col_start_ = count;
    row_index_.resize(entries.size());
    value_.resize(entries.size());
    std::vector<int> next(count.begin(), count.end() - 1);
    for (const auto& e : entries) {
      const int at = next[e.col]++;
      row_index_[at] = e.row;
      value_[at] = static_cast<Scalar>(e.value);
    }
    const int total = n_ + m_;
    lower_.resize(total);
    upper_.resize(total);
    cost_.assign(total, Scalar(0));
    for (int j = 0; j < n_; ++j) {
      lower_[j] = col_lower[j];
      upper_[j] = col_upper[j];
      cost_[j] = cost[j];
    }
    for (int i = 0; i < m_; ++i) {
      lower_[n_ + i] = -static_cast<Scalar>(row_upper[i]);
      upper_[n_ + i] = -static_cast<Scalar>(row_lower[i]);
    }
    for (int k = 0; k < total; ++k) {
      if (lower_[k] > upper_[k]) throw std::invalid_argument("LP bound interval is empty");
    }
    x_.assign(total, Scalar(0));
    d_.assign(total, Scalar(0));
    status_.assign(total, kAtLower);
    position_.assign(total, -1);
    slack_basis();
  }

  int rows() const { return m_; }
  int cols() const { return n_; }

  void set_col_bounds(int j, double lo, double hi) { set_bounds(j, lo, hi); }
  void set_row_bounds(int i, double lo, double hi) { set_bounds(n_ + i, -hi, -lo); }
  double col_lower(int j) const { return static_cast<double>(lower_[j]); }
  double col_upper(int j) const { return static_cast<double>(upper_[j]); }

  LpStatus solve(const LpOptions& opts = {}) {
    iterations_ = 0;
    if (needs_refactor_) refactor();
    compute_duals();
    make_dual_feasible();
    compute_primal();
    long since_refactor = 0;
    long stalled = 0;
    int recoveries = 0;
    Scalar best = objective_internal();
    bool bland = false;
    while (true) {
      if (iterations_ >= opts.iteration_limit) return LpStatus::kIterationLimit;
      if ((iterations_ & 15) == 0 && std::chrono::steady_clock::now() > opts.deadline) {
        return LpStatus::kTimeLimit;
      }
      const Scalar obj = objective_internal();
      if (obj > static_cast<Scalar>(opts.cutoff) + cutoff_tol(opts.cutoff)) {
        return LpStatus::kCutoff;
      }
      if (obj > best + Scalar(1e-12) * (Scalar(1) + abs(best))) {
        best = obj;
        stalled = 0;
        bland = false;
      } else if (++stalled > kStallLimit) {
        bland = true;
      }

      const int r = choose_leaving(bland);
      if (r < 0) {
        for (int k = 0; k < n_ + m_; ++k) {
          if (status_[k] != kBasic && at_artificial_bound(k)) return LpStatus::kUnbounded;
        }
        return LpStatus::kOptimal;
      }
      const int p = basis_[r];
      const bool to_lower = x_[p] < lower_[p];
      const Scalar target = to_lower ? lower_[p] : upper_[p];
      const Scalar dir = to_lower ? Scalar(1) : Scalar(-1);

      pivot_row(r);
      const int q = choose_entering(dir, bland);
      if (q < 0) {
        if (since_refactor > 0 && recoveries < kMaxRecoveries) {
          ++recoveries;
          refresh();
          since_refactor = 0;
          continue;
        }
        return LpStatus::kInfeasible;
      }

      column(q, w_);
      const Scalar wr = w_(r);
      if (abs(wr - alpha_[q]) > Scalar(1e-7) * (Scalar(1) + abs(wr)) || abs(wr) < kPivotTol) {
        if (recoveries >= kMaxRecoveries) return LpStatus::kNumericalFailure;
        ++recoveries;
        refresh();
        since_refactor = 0;
        continue;
      }

      // Dual step.
      const Scalar theta_d = d_[q] / alpha_[q];
      for (int k : nonbasic_candidates_) d_[k] -= theta_d * alpha_[k];
      d_[q] = Scalar(0);
      d_[p] = -theta_d;

      // Primal step: x_q moves by t, x_B by -t w.
      const Scalar t = (x_[p] - target) / wr;
      for (int i = 0; i < m_; ++i) {
        if (w_(i) != Scalar(0)) x_[basis_[i]] -= t * w_(i);
      }
      x_[q] += t;
      x_[p] = target;

      status_[p] = to_lower ? kAtLower : kAtUpper;
      position_[p] = -1;
      status_[q] = kBasic;
      position_[q] = r;
      basis_[r] = q;
      update_inverse(r, wr);

      ++iterations_;
      ++total_iterations_;
      if (++since_refactor >= refactor_interval()) {
        refresh();
        since_refactor = 0;
      }
    }
  }

  double objective() const { return static_cast<double>(objective_internal()); }
  double value(int j) const { return static_cast<double>(x_[j]); }
  std::vector<double> primal() const {
    std::vector<double> out(static_cast<size_t>(n_));
    for (int j = 0; j < n_; ++j) out[j] = static_cast<double>(x_[j]);
    return out;
  }
  double row_activity(int i) const { return -static_cast<double>(x_[n_ + i]); }
  double reduced_cost(int j) const { return static_cast<double>(d_[j]); }
  bool is_basic(int j) const { return status_[j] == kBasic; }
  long iterations() const { return iterations_; }
  long total_iterations() const { return total_iterations_; }

 private:
  enum Status : unsigned char { kBasic, kAtLower, kAtUpper, kAtZero };

  static constexpr Scalar kBigBound = Scalar(1e7);
  static constexpr Scalar kPrimalTol = Scalar(1e-9);
  static constexpr Scalar kDualTol = Scalar(1e-9);
  static constexpr Scalar kPivotTol = Scalar(1e-9);
  static constexpr long kStallLimit = 200;
  static constexpr int kMaxRecoveries = 5;

  static Scalar abs(Scalar v) { return v < Scalar(0) ? -v : v; }
  static bool finite(Scalar v) { return std::isfinite(static_cast<double>(v)); }

  static Scalar cutoff_tol(double cutoff) {
    return Scalar(1e-9) * (Scalar(1) + abs(static_cast<Scalar>(cutoff)));
  }

  long refactor_interval() const { return std::max<long>(100, m_ / 2); }

  void set_bounds(int k, double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("LP bound interval is empty");
    lower_[k] = lo;
    upper_[k] = hi;
    if (status_[k] != kBasic) x_[k] = nonbasic_value(k);
    primal_dirty_ = true;
  }

  Scalar nonbasic_value(int k) const {
    switch (status_[k]) {
      case kAtLower:
        return finite(lower_[k]) ? lower_[k] : -kBigBound;
      case kAtUpper:
        return finite(upper_[k]) ? upper_[k] : kBigBound;
      default:
        return Scalar(0);
    }
  }

  bool at_artificial_bound(int k) const {
    return (status_[k] == kAtLower && !finite(lower_[k])) ||
           (status_[k] == kAtUpper && !finite(upper_[k]));
  }

  Scalar objective_internal() const {
    Scalar z(0);
    for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
    return z;
  }

  void slack_basis() {
    basis_.resize(m_);
    for (int j = 0; j < n_; ++j) {
      status_[j] = kAtLower;
      position_[j] = -1;
    }
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      status_[n_ + i] = kBasic;
      position_[n_ + i] = i;
    }
    binv_ = Mat::Identity(m_, m_);
    row_norm_.assign(m_, Scalar(1));
    needs_refactor_ = false;
    primal_dirty_ = true;
  }

  void refresh() {
    refactor();
    compute_duals();
    make_dual_feasible();
    compute_primal();
  }

  // Rebuilds B^{-1}. With structural basics C and rows R_n whose logical is
  // nonbasic, B^{-1} only needs the inverse of K = A[R_n, C].
  void refactor() {
    needs_refactor_ = false;
    std::vector<int> structural_pos;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < n_) structural_pos.push_back(r);
    }
    std::vector<int> free_rows;  // R_n
    std::vector<int> row_slot(m_, -1);
    for (int i = 0; i < m_; ++i) {
      if (status_[n_ + i] != kBasic) {
        row_slot[i] = static_cast<int>(free_rows.size());
        free_rows.push_back(i);
      }
    }
    const int k = static_cast<int>(structural_pos.size());
    if (static_cast<int>(free_rows.size()) != k) {
      slack_basis();
      return;
    }
    binv_.setZero(m_, m_);
    if (k > 0) {
      Mat K = Mat::Zero(k, k);
      for (int t = 0; t < k; ++t) {
        const int j = basis_[structural_pos[t]];
        for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
          const int s = row_slot[row_index_[e]];
          if (s >= 0) K(s, t) = value_[e];
        }
      }
      Eigen::PartialPivLU<Mat> lu(K);
      const auto& packed = lu.matrixLU();
      Scalar big(0);
      Scalar small = std::numeric_limits<Scalar>::max();
      for (int t = 0; t < k; ++t) {
        big = std::max(big, abs(packed(t, t)));
        small = std::min(small, abs(packed(t, t)));
      }
      if (!(small > Scalar(1e-11) * big) || !finite(small)) {
        slack_basis();
        return;
      }
      const Mat kinv = lu.inverse();
      for (int t = 0; t < k; ++t) {
        for (int s = 0; s < k; ++s) binv_(structural_pos[t], free_rows[s]) = kinv(t, s);
      }
      // Logical of row i: row i of B^{-1} = e_i - A[i, C] K^{-1}.
      Mat aic = Mat::Zero(m_, k);
      for (int t = 0; t < k; ++t) {
        const int j = basis_[structural_pos[t]];
        for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
          if (row_slot[row_index_[e]] < 0) aic(row_index_[e], t) = value_[e];
        }
      }
      for (int i = 0; i < m_; ++i) {
        if (row_slot[i] >= 0) continue;
        const int r = position_[n_ + i];
        Eigen::Matrix<Scalar, 1, Eigen::Dynamic> g = -aic.row(i) * kinv;
        for (int s = 0; s < k; ++s) binv_(r, free_rows[s]) = g(s);
      }
    }
    for (int i = 0; i < m_; ++i) {
      if (row_slot[i] < 0) binv_(position_[n_ + i], i) = Scalar(1);
    }
    row_norm_.resize(m_);
    for (int r = 0; r < m_; ++r) row_norm_[r] = binv_.row(r).squaredNorm();
    primal_dirty_ = true;
  }

  void compute_duals() {
    // y^T = c_B^T B^{-1}; d_k = c_k - y^T a_k (logical columns are e_i).
    Vec cb(m_);
    for (int r = 0; r < m_; ++r) cb(r) = cost_[basis_[r]];
    const Vec y = binv_.transpose() * cb;
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == kBasic) {
        d_[j] = Scalar(0);
        continue;
      }
      Scalar s = cost_[j];
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) s -= y(row_index_[e]) * value_[e];
      d_[j] = s;
    }
    for (int i = 0; i < m_; ++i) d_[n_ + i] = status_[n_ + i] == kBasic ? Scalar(0) : -y(i);
  }

  // Every variable is boxed (possibly artificially), so placing each
  // nonbasic at the bound its reduced cost asks for restores dual feasibility.
  void make_dual_feasible() {
    for (int k = 0; k < n_ + m_; ++k) {
      if (status_[k] == kBasic) continue;
      const Status before = status_[k];
      if (lower_[k] == upper_[k]) {
        status_[k] = kAtLower;
      } else if (d_[k] > kDualTol) {
        status_[k] = kAtLower;
      } else if (d_[k] < -kDualTol) {
        status_[k] = kAtUpper;
      } else if ((status_[k] == kAtLower && finite(lower_[k])) ||
                 (status_[k] == kAtUpper && finite(upper_[k]))) {
        // keep
      } else if (finite(lower_[k])) {
        status_[k] = kAtLower;
      } else if (finite(upper_[k])) {
        status_[k] = kAtUpper;
      } else {
        status_[k] = kAtZero;
      }
      const Scalar v = nonbasic_value(k);
      if (status_[k] != before || x_[k] != v) {
        x_[k] = v;
        primal_dirty_ = true;
      }
    }
  }

  void compute_primal() {
    Vec rhs = Vec::Zero(m_);
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == kBasic) continue;
      x_[j] = nonbasic_value(j);
      if (x_[j] == Scalar(0)) continue;
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) rhs(row_index_[e]) -= value_[e] * x_[j];
    }
    for (int i = 0; i < m_; ++i) {
      const int k = n_ + i;
      if (status_[k] == kBasic) continue;
      x_[k] = nonbasic_value(k);
      rhs(i) -= x_[k];
    }
    const Vec xb = binv_ * rhs;
    for (int r = 0; r < m_; ++r) x_[basis_[r]] = xb(r);
    primal_dirty_ = false;
  }

  Scalar infeasibility(int k) const {
    const Scalar tol_lo = kPrimalTol * (Scalar(1) + abs(lower_[k]));
    const Scalar tol_hi = kPrimalTol * (Scalar(1) + abs(upper_[k]));
    if (x_[k] < lower_[k] - tol_lo) return lower_[k] - x_[k];
    if (x_[k] > upper_[k] + tol_hi) return x_[k] - upper_[k];
    return Scalar(0);
  }

  // Dual steepest edge with exact weights ||e_r^T B^{-1}||^2.
  int choose_leaving(bool bland) const {
    int best = -1;
    Scalar best_score(0);
    int best_var = n_ + m_;
    for (int r = 0; r < m_; ++r) {
      const Scalar inf = infeasibility(basis_[r]);
      if (inf <= Scalar(0)) continue;
      if (bland) {
        if (basis_[r] < best_var) {
          best_var = basis_[r];
          best = r;
        }
        continue;
      }
      const Scalar score = inf * inf / std::max(row_norm_[r], Scalar(1e-12));
      if (score > best_score) {
        best_score = score;
        best = r;
      }
    }
    return best;
  }

  void pivot_row(int r) {
    alpha_.assign(n_ + m_, Scalar(0));
    nonbasic_candidates_.clear();
    const auto rho = binv_.row(r);
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == kBasic) continue;
      Scalar s(0);
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) s += rho(row_index_[e]) * value_[e];
      alpha_[j] = s;
      if (s != Scalar(0)) nonbasic_candidates_.push_back(j);
    }
    for (int i = 0; i < m_; ++i) {
      const int k = n_ + i;
      if (status_[k] == kBasic) continue;
      alpha_[k] = rho(i);
      if (rho(i) != Scalar(0)) nonbasic_candidates_.push_back(k);
    }
  }

  // Harris two-pass ratio test (plain minimum ratio with index ties under
  // Bland's rule).
  int choose_entering(Scalar dir, bool bland) const {
    Scalar bound = std::numeric_limits<Scalar>::infinity();
    for (int k : nonbasic_candidates_) {
      if (!eligible(k, dir)) continue;
      const Scalar a = abs(alpha_[k]);
      const Scalar ratio = bland ? abs(d_[k]) / a : (abs(d_[k]) + kDualTol) / a;
      bound = std::min(bound, ratio);
    }
    if (!finite(bound)) return -1;
    int best = -1;
    Scalar best_alpha(0);
    for (int k : nonbasic_candidates_) {
      if (!eligible(k, dir)) continue;
      const Scalar a = abs(alpha_[k]);
      if (abs(d_[k]) / a > bound) continue;
      if (bland) {
        if (best < 0 || k < best) best = k;
      } else if (a > best_alpha) {
        best_alpha = a;
        best = k;
      }
    }
    return best;
  }

  bool eligible(int k, Scalar dir) const {
    if (lower_[k] == upper_[k]) return false;
    const Scalar a = alpha_[k];
    if (abs(a) < kPivotTol) return false;
    const bool can_increase = status_[k] == kAtLower || status_[k] == kAtZero;
    const bool can_decrease = status_[k] == kAtUpper || status_[k] == kAtZero;
    return (dir * a < Scalar(0) && can_increase) || (dir * a > Scalar(0) && can_decrease);
  }

  void column(int q, Vec& out) const {
    if (q >= n_) {
      out = binv_.col(q - n_);
      return;
    }
    out = Vec::Zero(m_);
    for (int e = col_start_[q]; e < col_start_[q + 1]; ++e) out += binv_.col(row_index_[e]) * value_[e];
  }

  void update_inverse(int r, Scalar wr) {
    binv_.row(r) /= wr;
    const auto pivot = binv_.row(r);
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const Scalar wi = w_(i);
      if (wi != Scalar(0)) {
        binv_.row(i).noalias() -= wi * pivot;
        row_norm_[i] = binv_.row(i).squaredNorm();
      }
    }
    row_norm_[r] = pivot.squaredNorm();
  }

  int m_;
  int n_;
  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<Scalar> value_;
  std::vector<Scalar> lower_, upper_, cost_;
  std::vector<Scalar> x_, d_;
  std::vector<Status> status_;
  std::vector<int> position_;
  std::vector<int> basis_;
  Mat binv_;
  std::vector<Scalar> row_norm_;
  std::vector<Scalar> alpha_;
  std::vector<int> nonbasic_candidates_;
  Vec w_;
  bool needs_refactor_ = false;
  bool primal_dirty_ = true;
  long iterations_ = 0;
  long total_iterations_ = 0;
};

}  // namespace slimkit::lp
