#include "slimkit/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>
#include <stdexcept>

#include "slimkit/lp/dual_simplex.hpp"

namespace slimkit {

namespace {

using Clock = std::chrono::steady_clock;
using Lp = lp::DualSimplex<double>;

constexpr double kIntegralityTol = 1e-6;
constexpr double kObjectiveTol = 1e-9;
constexpr double kFeasibilityTol = 1e-7;

struct Node {
  int parent = -1;
  int var = -1;
  double lower = 0.0;
  double upper = 0.0;
  double bound = -kInf;
  int depth = 0;
};

struct OpenEntry {
  double bound;
  int depth;
  int id;
};

// Best bound first; deeper nodes, then older nodes, break ties.
struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

std::unique_ptr<Lp> make_lp(const IntegerProgram& ip) {
  std::vector<lp::LpEntry> entries;
  std::vector<double> row_lo, row_hi;
  for (int r = 0; r < ip.num_constraints(); ++r) {
    const auto& c = ip.constraint(r);
    for (const auto& [k, a] : c.terms) {
      if (a != 0.0) entries.push_back({r, k, a});
    }
    row_lo.push_back(c.sense == Sense::kLessEqual ? -kInf : c.rhs);
    row_hi.push_back(c.sense == Sense::kGreaterEqual ? kInf : c.rhs);
  }
  std::vector<double> lo, hi;
  for (const auto& v : ip.variables()) {
    lo.push_back(v.is_integral() ? std::ceil(v.lower - kIntegralityTol) : v.lower);
    hi.push_back(v.is_integral() ? std::floor(v.upper + kIntegralityTol) : v.upper);
  }
  return std::make_unique<Lp>(ip.num_constraints(), ip.num_variables(), entries, lo, hi, row_lo,
                              row_hi, ip.objective());
}

class BranchAndBound {
 public:
  BranchAndBound(const IntegerProgram& ip, const SolveOptions& opts)
      : ip_(ip), opts_(opts), start_(Clock::now()) {
    const double limit = std::max(opts.time_limit, 0.0);
    deadline_ = limit >= 1e9 ? Clock::time_point::max()
                             : start_ + std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double>(limit));
  }

  SolveResult run() {
    for (const auto& v : ip_.variables()) {
      if (v.is_integral() && std::ceil(v.lower - kIntegralityTol) > std::floor(v.upper + kIntegralityTol)) {
        return finish(false, true);
      }
    }
    lp_ = make_lp(ip_);
    for (int k = 0; k < ip_.num_variables(); ++k) {
      root_lower_.push_back(lp_->col_lower(k));
      root_upper_.push_back(lp_->col_upper(k));
    }
    for (const auto& x : opts_.warm_starts) consider(x);

    nodes_.push_back(Node{});
    open_.push({-kInf, 0, 0});
    bool limit_hit = false;
    while (!open_.empty()) {
      if (node_count_ >= opts_.node_limit || Clock::now() > deadline_) {
        limit_hit = true;
        break;
      }
      if (has_incumbent() && relative_gap(incumbent_, global_bound()) <= opts_.gap_tolerance) break;
      const OpenEntry top = open_.top();
      open_.pop();
      if (prunable(nodes_[top.id].bound)) continue;
      if (!process(top.id)) {
        // Out of time inside the relaxation: the node stays open.
        open_.push(top);
        limit_hit = true;
        break;
      }
      if (unbounded_) break;
      record_progress(false);
    }
    return finish(limit_hit, false);
  }

 private:
  bool has_incumbent() const { return !incumbent_x_.empty(); }

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  double prune_tol() const {
    return std::max(kObjectiveTol * std::max(1.0, std::abs(incumbent_)),
                    opts_.gap_tolerance * std::abs(incumbent_));
  }

  bool prunable(double bound) const {
    return has_incumbent() && bound >= incumbent_ - prune_tol();
  }

  double global_bound() const {
    double b = has_incumbent() ? incumbent_ : kInf;
    if (!open_.empty()) b = std::min(b, open_.top().bound);
    return b;
  }

  void consider(const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != ip_.num_variables()) return;
    if (ip_.max_violation(x) > kFeasibilityTol) return;
    const double obj = ip_.objective_value(x);
    add_to_pool(x, obj);
    if (!has_incumbent() || obj < incumbent_ - 1e-12) {
      incumbent_ = obj;
      incumbent_x_ = x;
      record_progress(true);
    }
  }

  void add_to_pool(const std::vector<double>& x, double obj) {
    if (opts_.pool_size <= 0) return;
    for (const auto& e : pool_) {
      if (e.x == x) return;
    }
    auto at = std::find_if(pool_.begin(), pool_.end(),
                           [&](const PoolEntry& e) { return obj < e.objective; });
    pool_.insert(at, PoolEntry{x, obj});
    if (static_cast<int>(pool_.size()) > opts_.pool_size) pool_.pop_back();
  }

  void record_progress(bool force) {
    if (!force && node_count_ % 1000 != 0) return;
    progress_.push_back({elapsed(), node_count_, has_incumbent() ? incumbent_ : kInf, global_bound()});
  }

  void apply_node_bounds(int id) {
    for (int k : touched_) lp_->set_col_bounds(k, root_lower_[k], root_upper_[k]);
    touched_.clear();
    std::vector<int> chain;
    for (int at = id; at > 0; at = nodes_[at].parent) chain.push_back(at);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const Node& n = nodes_[*it];
      lp_->set_col_bounds(n.var, n.lower, n.upper);
      touched_.push_back(n.var);
    }
  }

  lp::LpStatus solve_lp(double cutoff) {
    lp::LpOptions o;
    o.deadline = deadline_;
    o.cutoff = cutoff;
    lp::LpStatus s = lp_->solve(o);
    lp_iterations_ += lp_->iterations();
    if (s == lp::LpStatus::kNumericalFailure || s == lp::LpStatus::kIterationLimit) {
      // Start over from a fresh slack basis once.
      auto fresh = make_lp(ip_);
      for (int k = 0; k < ip_.num_variables(); ++k) {
        fresh->set_col_bounds(k, lp_->col_lower(k), lp_->col_upper(k));
      }
      lp_ = std::move(fresh);
      s = lp_->solve(o);
      lp_iterations_ += lp_->iterations();
      if (s == lp::LpStatus::kNumericalFailure || s == lp::LpStatus::kIterationLimit) {
        throw std::runtime_error("relaxation failed at branch-and-bound node " +
                                 std::to_string(node_count_));
      }
    }
    return s;
  }

  // Returns false when the time limit interrupted the relaxation.
  bool process(int id) {
    ++node_count_;
    apply_node_bounds(id);
    const double cutoff = has_incumbent() ? incumbent_ - prune_tol() : kInf;
    const lp::LpStatus status = solve_lp(cutoff);
    if (status == lp::LpStatus::kTimeLimit) {
      --node_count_;
      return false;
    }
    if (status == lp::LpStatus::kUnbounded) {
      if (id == 0) unbounded_ = true;
      return true;
    }
    if (status != lp::LpStatus::kOptimal) return true;  // infeasible or cut off
    const double z = std::max(lp_->objective(), nodes_[id].bound);
    if (id == 0) root_bound_ = z;
    if (prunable(z)) return true;
    const std::vector<double> x = lp_->primal();

    if (opts_.heuristic && (node_count_ == 1 || node_count_ % opts_.heuristic_frequency == 0)) {
      if (auto guess = opts_.heuristic(x)) consider(*guess);
      if (prunable(z)) return true;
    }

    int branch_var = select_branch(x, kIntegralityTol);
    if (branch_var < 0) {
      const double found = integral_candidate(id, x);
      if (found <= z + kObjectiveTol * (1.0 + std::abs(z))) return true;
      branch_var = select_branch(x, 0.0);  // tolerance artefact: keep splitting
      if (branch_var < 0) return true;
    }
    branch(id, branch_var, x[branch_var], z);
    return true;
  }

  // Highest priority class first, then most fractional, then lowest index.
  int select_branch(const std::vector<double>& x, double tol) const {
    int best = -1;
    int best_priority = std::numeric_limits<int>::min();
    double best_frac = 0.0;
    for (int k = 0; k < ip_.num_variables(); ++k) {
      const auto& v = ip_.variable(k);
      if (!v.is_integral()) continue;
      const double frac = std::abs(x[k] - std::round(x[k]));
      if (frac <= tol) continue;
      if (v.priority > best_priority || (v.priority == best_priority && frac > best_frac)) {
        best = k;
        best_priority = v.priority;
        best_frac = frac;
      }
    }
    return best;
  }

  // Rounds the integral relaxation solution into a certified assignment.
  // Returns its objective (+inf if none could be certified).
  double integral_candidate(int id, std::vector<double> x) {
    for (int k = 0; k < ip_.num_variables(); ++k) {
      if (ip_.variable(k).is_integral()) x[k] = std::round(x[k]);
    }
    if (ip_.max_violation(x) <= 1e-9) {
      consider(x);
      return ip_.objective_value(x);
    }
    // Fix the integers and re-solve for the continuous part.
    for (int k = 0; k < ip_.num_variables(); ++k) {
      if (!ip_.variable(k).is_integral()) continue;
      lp_->set_col_bounds(k, x[k], x[k]);
      touched_.push_back(k);
    }
    const lp::LpStatus s = solve_lp(kInf);
    double found = kInf;
    if (s == lp::LpStatus::kOptimal) {
      std::vector<double> fixed = lp_->primal();
      for (int k = 0; k < ip_.num_variables(); ++k) {
        if (ip_.variable(k).is_integral()) fixed[k] = x[k];
      }
      if (ip_.max_violation(fixed) <= kFeasibilityTol) {
        consider(fixed);
        found = ip_.objective_value(fixed);
      }
    }
    apply_node_bounds(id);
    return found;
  }

  void branch(int id, int var, double value, double z) {
    const double lo = lp_->col_lower(var);
    const double hi = lp_->col_upper(var);
    const double down = std::floor(value);
    const double up = std::ceil(value) == down ? down + 1.0 : std::ceil(value);
    const int depth = nodes_[id].depth + 1;
    if (down >= lo) {
      nodes_.push_back(Node{id, var, lo, down, z, depth});
      open_.push({z, depth, static_cast<int>(nodes_.size()) - 1});
    }
    if (up <= hi) {
      nodes_.push_back(Node{id, var, up, hi, z, depth});
      open_.push({z, depth, static_cast<int>(nodes_.size()) - 1});
    }
  }

  SolveResult finish(bool limit_hit, bool trivially_infeasible) {
    SolveResult r;
    r.node_count = node_count_;
    r.lp_iterations = lp_iterations_;
    r.pool = pool_;
    if (trivially_infeasible) {
      r.status = SolveStatus::kInfeasible;
      r.wall_time = elapsed();
      return r;
    }
    if (unbounded_) {
      r.status = SolveStatus::kUnbounded;
      r.wall_time = elapsed();
      return r;
    }
    const double bound = global_bound();
    if (has_incumbent()) {
      r.x = incumbent_x_;
      r.objective = incumbent_;
      r.dual_bound = std::min(bound, incumbent_);
      r.gap = relative_gap(r.objective, r.dual_bound);
      const bool closed = open_.empty() || r.gap <= opts_.gap_tolerance;
      r.status = closed ? SolveStatus::kOptimal
                        : (limit_hit ? SolveStatus::kFeasibleTimeLimit : SolveStatus::kOptimal);
      if (r.status == SolveStatus::kOptimal && open_.empty()) {
        r.dual_bound = r.objective;
        r.gap = 0.0;
      }
    } else if (open_.empty()) {
      r.status = SolveStatus::kInfeasible;
    } else {
      r.status = SolveStatus::kLimitNoIncumbent;
      r.dual_bound = bound;
    }
    progress_.push_back({elapsed(), node_count_, r.objective, r.dual_bound});
    r.progress = progress_;
    r.wall_time = elapsed();
    return r;
  }

  const IntegerProgram& ip_;
  const SolveOptions& opts_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  std::unique_ptr<Lp> lp_;
  std::vector<double> root_lower_, root_upper_;
  std::vector<int> touched_;
  std::vector<Node> nodes_;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open_;
  double incumbent_ = kInf;
  std::vector<double> incumbent_x_;
  std::vector<PoolEntry> pool_;
  std::vector<ProgressPoint> progress_;
  long node_count_ = 0;
  long lp_iterations_ = 0;
  double root_bound_ = -kInf;
  bool unbounded_ = false;
};

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasibleTimeLimit:
      return "feasible-time-limit";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kLimitNoIncumbent:
      return "limit-no-incumbent";
  }
  return "unknown";
}

double relative_gap(double objective, double bound) {
  if (!std::isfinite(objective) || !std::isfinite(bound)) return kInf;
  return std::max(objective - bound, 0.0) / std::max(std::abs(objective), 1e-10);
}

SolveResult solve(const IntegerProgram& ip, const SolveOptions& opts) {
  BranchAndBound bb(ip, opts);
  return bb.run();
}

}  // namespace slimkit
