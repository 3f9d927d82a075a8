#include "lrnorm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrnorm/error.hpp"

namespace lrnorm {

namespace {

using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Revised simplex state over the augmented matrix [A | I] (artificials last).
class Revised {
 public:
  Revised(const Mat& A, const Vec& b, Real tol)
      : A_(A), b_(b), m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())), tol_(tol) {
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

    Vec column(int j) const {
    if (j < n_) return A_.col(j);
    Vec e = Vec::Zero(m_);
    e(j - n_) = 1.0;
    return e;
  }

  void factor() {
    Mat B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    lu_.compute(B);
    lut_.compute(B.transpose());
    xb_ = lu_.solve(b_);
  }

  // Pivots until no column in [0, allowed) has reduced cost above tolerance.
  // Pricing is Dantzig's largest reduced cost; a run of degenerate pivots
  // switches to Bland's rule until the objective moves again.
  LPStatus optimise(const Vec& cost, int allowed, long& iterations, long limit,
                    Real target = std::numeric_limits<Real>::infinity()) {
    constexpr int kDegenerateRun = 20;
    const Real cost_scale = 1.0 + cost.lpNorm<Eigen::Infinity>();
    int degenerate = 0;
    int last_leave = -1, last_entered = -1, last_left = -1;
    std::vector<bool> taboo(n_ + m_, false);
    for (;;) {
      factor();
      if (last_leave >= 0 && !(lu_.rcond() > 1e-16)) {
        // The previous pivot left the basis nearly singular; undo it.
        basis_[last_leave] = last_left;
        taboo[last_entered] = true;
        last_leave = -1;
        factor();
      }
      Vec cb(m_);
      for (int i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
      if (cb.dot(xb_) >= target) return LPStatus::kOptimal;
      const Vec y = lut_.solve(cb);
      std::vector<bool> in_basis(n_ + m_, false);
      for (int j : basis_) in_basis[j] = true;
      const bool bland = degenerate >= kDegenerateRun;
      int enter = -1;
      Real best_d = tol_ * cost_scale;
      for (int j = 0; j < allowed; ++j) {
        if (in_basis[j] || taboo[j]) continue;
        Real d = cost(j);
        if (j < n_) {
          d -= y.dot(A_.col(j));
        } else {
          d -= y(j - n_);
        }
        if (d > best_d) {
          enter = j;
          if (bland) break;
          best_d = d;
        }
      }
      if (enter < 0) return LPStatus::kOptimal;
      if (++iterations > limit) return LPStatus::kIterationLimit;
      const Vec u = lu_.solve(column(enter));
      const Real piv_tol = 1e-9 * (1.0 + u.lpNorm<Eigen::Infinity>());
      Real ratio = std::numeric_limits<Real>::infinity();
      for (int i = 0; i < m_; ++i)
        if (u(i) > piv_tol) ratio = std::min(ratio, std::max(Real(0), xb_(i)) / u(i));
      if (!std::isfinite(ratio)) return LPStatus::kUnbounded;
      int leave = -1;
      for (int i = 0; i < m_; ++i) {
        if (u(i) <= piv_tol) continue;
        if (std::max(Real(0), xb_(i)) / u(i) > ratio * Real(1 + 1e-15) + Real(1e-300)) continue;
        if (leave < 0 || (bland ? basis_[i] < basis_[leave] : u(i) > u(leave))) leave = i;
      }
      degenerate = ratio * best_d <= tol_ * cost_scale * 1e-3 ? degenerate + 1 : 0;
      if (degenerate == 0) std::fill(taboo.begin(), taboo.end(), false);
      last_leave = leave;
      last_entered = enter;
      last_left = basis_[leave];
      basis_[leave] = enter;
    }
  }

  // Swaps zero-level artificials for structural columns; returns rows where no swap exists.
  std::vector<int> expel_artificials() {
    std::vector<int> stuck;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      factor();
      // Row i of B^{-1} A tells which structural columns can replace the artificial.
      Vec ei = Vec::Zero(m_);
      ei(i) = 1.0;
      const Vec row = lut_.solve(ei);
      int pick = -1;
      Real best = 1e-9;
      std::vector<bool> in_basis(n_, false);
      for (int j : basis_)
        if (j < n_) in_basis[j] = true;
      for (int j = 0; j < n_; ++j) {
        if (in_basis[j]) continue;
        const Real v = std::abs(row.dot(A_.col(j)));
        if (v > best) {
          best = v;
          pick = j;
        }
      }
      if (pick >= 0) {
        basis_[i] = pick;
      } else {
        stuck.push_back(i);
      }
    }
    return stuck;
  }

  void set_basis(std::vector<int> basis) { basis_ = std::move(basis); }
  const std::vector<int>& basis() const { return basis_; }
  const Vec& xb() const { return xb_; }

 private:
  Mat A_;
  Vec b_;
  int m_, n_;
  Real tol_;
  std::vector<int> basis_;
  Eigen::PartialPivLU<Mat> lu_, lut_;
  Vec xb_;
};

}  // namespace

LPSolution simplex_maximize(const Eigen::MatrixXd& A_in, const Eigen::VectorXd& b_in,
                            const Eigen::VectorXd& c, const SimplexOptions& options) {
  const int m = static_cast<int>(A_in.rows());
  const int n = static_cast<int>(A_in.cols());
  require(b_in.size() == m && c.size() == n, "simplex: dimension mismatch");
  Mat A = A_in.cast<Real>();
  Vec b = b_in.cast<Real>();
  for (int i = 0; i < m; ++i)
    if (b(i) < 0.0) {
      A.row(i) *= -1.0;
      b(i) = -b(i);
    }
  LPSolution sol;
  const Real scale = 1.0 + b.lpNorm<Eigen::Infinity>();

  Revised phase1(A, b, options.tolerance);
  Vec c1 = Vec::Zero(n + m);
  c1.tail(m).setConstant(-1.0);
  const Real feasibility_tol = 1e-9 * scale;
  LPStatus st =
      phase1.optimise(c1, n + m, sol.iterations, options.max_iterations, -0.1 * feasibility_tol);
  if (st == LPStatus::kIterationLimit) {
    sol.status = st;
    return sol;
  }
  phase1.factor();
  Real infeasibility = 0.0;
  for (int i = 0; i < m; ++i)
    if (phase1.basis()[i] >= n) infeasibility += std::max(Real(0), phase1.xb()(i));
  if (infeasibility > feasibility_tol) {
    sol.status = LPStatus::kInfeasible;
    return sol;
  }
  const std::vector<int> redundant = phase1.expel_artificials();
  const std::vector<int> basis = phase1.basis();

  // Phase 2 on the rows that are not redundant.
  std::vector<int> keep;
  for (int i = 0; i < m; ++i)
    if (std::find(redundant.begin(), redundant.end(), i) == redundant.end()) keep.push_back(i);
  const int mk = static_cast<int>(keep.size());
  Mat A2(mk, n);
  Vec b2(mk);
  for (int a = 0; a < mk; ++a) {
    A2.row(a) = A.row(keep[a]);
    b2(a) = b(keep[a]);
  }
  Revised phase2(A2, b2, options.tolerance);
  std::vector<int> start;
  for (int a = 0; a < mk; ++a) start.push_back(basis[keep[a]]);
  // Artificials left in the basis (a redundant row was dropped) are renumbered.
  for (int& j : start)
    if (j >= n) j = n + static_cast<int>(&j - start.data());
  phase2.set_basis(start);
  Vec c2 = Vec::Zero(n + mk);
  c2.head(n) = c.cast<Real>();
  st = phase2.optimise(c2, n, sol.iterations, options.max_iterations);
  sol.status = st;
  if (st != LPStatus::kOptimal) return sol;
  phase2.factor();
  sol.x = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < mk; ++a) {
    const int j = phase2.basis()[a];
    if (j < n) sol.x(j) = static_cast<double>(std::max(Real(0), phase2.xb()(a)));
  }
  sol.basis = phase2.basis();
  sol.objective = c.dot(sol.x);
  return sol;
}

}  // namespace lrnorm
