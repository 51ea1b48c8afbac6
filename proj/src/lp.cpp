#include "kantor/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace kantor::lp {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr std::size_t kRefactorEvery = 64;

std::ostream* g_dump = nullptr;

// Bounded-variable primal simplex working on  [A | I] x = b  with slack
// bounds encoding the row relations. Maintains an explicit dense inverse of
// the basis matrix, refactorized periodically.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) {
    n_ = lp.num_vars();
    build();
  }

  LpResult run() {
    LpResult res;
    // Phase 1: minimize the artificial mass.
    if (num_artificial_ > 0) {
      set_phase1_costs();
      const Status st = iterate(/*phase1=*/true);
      if (st != Status::Optimal) throw NumericalFailure("phase one did not terminate");
      double infeas = 0.0;
      for (std::size_t j = art_begin_; j < total_; ++j) infeas += value_[j];
      if (infeas > kFeasTol) {
        res.status = Status::Infeasible;
        res.iterations = iterations_;
        return res;
      }
      // Freeze artificials at zero for phase 2.
      for (std::size_t j = art_begin_; j < total_; ++j) {
        lo_[j] = 0.0;
        hi_[j] = 0.0;
        if (!basic_[j]) value_[j] = 0.0;
      }
    }

    set_phase2_costs();
    const Status st = iterate(/*phase1=*/false);
    res.status = st;
    res.iterations = iterations_;
    if (st != Status::Optimal) return res;

    res.primal.assign(value_.begin(), value_.begin() + static_cast<long>(n_));
    compute_duals(res);
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += lp_.objective[j] * res.primal[j];
    res.objective = obj;
    return res;
  }

 private:
  void build() {
    m_ = lp_.num_rows();
    // Drop all-zero rows (the only presolve); record their consistency.
    live_rows_.clear();
    for (std::size_t i = 0; i < m_; ++i) {
      bool all_zero = true;
      for (double a : lp_.rows[i])
        if (a != 0.0) { all_zero = false; break; }
      if (!all_zero) {
        live_rows_.push_back(i);
        continue;
      }
      const double b = lp_.rhs[i];
      const Rel r = lp_.relations[i];
      const bool ok = (r == Rel::LE && b >= -kFeasTol) || (r == Rel::GE && b <= kFeasTol) ||
                      (r == Rel::EQ && std::abs(b) <= kFeasTol);
      if (!ok) zero_row_infeasible_ = true;
    }
    m_ = live_rows_.size();

    slack_begin_ = n_;
    total_ = n_ + m_;  // artificials appended later
    lo_.assign(total_, 0.0);
    hi_.assign(total_, kInf);
    col_.assign(total_, std::vector<double>(m_, 0.0));

    const double sgn = lp_.sense == Sense::Max ? -1.0 : 1.0;
    cost_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      cost_[j] = sgn * lp_.objective[j];
      lo_[j] = lp_.lower.empty() ? 0.0 : lp_.lower[j];
      hi_[j] = lp_.upper.empty() ? kInf : lp_.upper[j];
      for (std::size_t i = 0; i < m_; ++i) col_[j][i] = lp_.rows[live_rows_[i]][j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = slack_begin_ + i;
      col_[j][i] = 1.0;
      switch (lp_.relations[live_rows_[i]]) {
        case Rel::LE: lo_[j] = 0.0; hi_[j] = kInf; break;
        case Rel::GE: lo_[j] = -kInf; hi_[j] = 0.0; break;
        case Rel::EQ: lo_[j] = 0.0; hi_[j] = 0.0; break;
      }
    }

    // Start nonbasic variables at their bound nearest zero.
    value_.assign(total_, 0.0);
    at_upper_.assign(total_, false);
    basic_.assign(total_, false);
    for (std::size_t j = 0; j < total_; ++j) value_[j] = start_value(j);

    // Residual per row decides slack-basic vs artificial-basic.
    std::vector<double> resid(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) resid[i] = lp_.rhs[live_rows_[i]];
    for (std::size_t j = 0; j < n_; ++j) {
      if (value_[j] == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) resid[i] -= col_[j][i] * value_[j];
    }

    basis_.assign(m_, 0);
    std::vector<std::size_t> needs_artificial;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = slack_begin_ + i;
      if (resid[i] >= lo_[s] - kFeasTol && resid[i] <= hi_[s] + kFeasTol) {
        basis_[i] = s;
        basic_[s] = true;
        value_[s] = std::clamp(resid[i], lo_[s], hi_[s]);
      } else {
        value_[s] = resid[i] > hi_[s] ? hi_[s] : lo_[s];
        at_upper_[s] = resid[i] > hi_[s];
        needs_artificial.push_back(i);
      }
    }

    art_begin_ = total_;
    num_artificial_ = needs_artificial.size();
    for (std::size_t k = 0; k < num_artificial_; ++k) {
      const std::size_t i = needs_artificial[k];
      const std::size_t s = slack_begin_ + i;
      const double gap = resid[i] - value_[s];
      const std::size_t j = total_ + k;
      col_.emplace_back(m_, 0.0);
      col_[j][i] = gap >= 0.0 ? 1.0 : -1.0;
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      cost_.push_back(0.0);
      value_.push_back(std::abs(gap));
      at_upper_.push_back(false);
      basic_.push_back(true);
      basis_[i] = j;
    }
    total_ += num_artificial_;

    binv_.assign(m_, std::vector<double>(m_, 0.0));
    refactorize();
  }

  double start_value(std::size_t j) const {
    if (lo_[j] > -kInf && hi_[j] < kInf)
      return std::abs(lo_[j]) <= std::abs(hi_[j]) ? lo_[j] : hi_[j];
    if (lo_[j] > -kInf) return lo_[j];
    if (hi_[j] < kInf) return hi_[j];
    return 0.0;
  }

  void set_phase1_costs() {
    work_cost_.assign(total_, 0.0);
    for (std::size_t j = art_begin_; j < total_; ++j) work_cost_[j] = 1.0;
  }
  void set_phase2_costs() {
    work_cost_ = cost_;
    work_cost_.resize(total_, 0.0);
  }

  void refactorize() {
    // Gauss-Jordan inverse of the basis columns, partial pivoting.
    std::vector<std::vector<double>> a(m_, std::vector<double>(2 * m_, 0.0));
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t r = 0; r < m_; ++r) a[r][i] = col_[basis_[i]][r];
      a[i][m_ + i] = 1.0;
    }
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r)
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      if (std::abs(a[piv][c]) < kPivotTol) throw NumericalFailure("singular basis");
      std::swap(a[c], a[piv]);
      const double d = a[c][c];
      for (std::size_t k = c; k < 2 * m_; ++k) a[c][k] /= d;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c || a[r][c] == 0.0) continue;
        const double f = a[r][c];
        for (std::size_t k = c; k < 2 * m_; ++k) a[r][k] -= f * a[c][k];
      }
    }
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c2 = 0; c2 < m_; ++c2) binv_[r][c2] = a[r][m_ + c2];
    recompute_basic_values();
  }

  void recompute_basic_values() {
    std::vector<double> rhs(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) rhs[i] = lp_.rhs[live_rows_[i]];
    for (std::size_t j = 0; j < total_; ++j) {
      if (basic_[j] || value_[j] == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) rhs[i] -= col_[j][i] * value_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < m_; ++k) v += binv_[i][k] * rhs[k];
      value_[basis_[i]] = v;
    }
  }

  std::vector<double> prices() const {
    std::vector<double> y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = work_cost_[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * binv_[i][k];
    }
    return y;
  }

  double reduced_cost(std::size_t j, const std::vector<double>& y) const {
    double d = work_cost_[j];
    for (std::size_t i = 0; i < m_; ++i) d -= y[i] * col_[j][i];
    return d;
  }

  Status iterate(bool phase1) {
    const std::size_t bland_after = 3 * (m_ + total_);
    const std::size_t cap = 2000 + 400 * (m_ + total_);
    std::size_t since_refactor = 0;

    for (;;) {
      if (iterations_ > cap)
        throw NumericalFailure("cycling guard exceeded after " + std::to_string(iterations_) +
                               " iterations");
      const bool bland = iterations_ >= bland_after;
      const auto y = prices();

      // Pricing: eligible nonbasic columns and their improvement rate.
      std::size_t enter = total_;
      double best = -kCostTol;
      int enter_dir = 0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (basic_[j] || lo_[j] == hi_[j]) continue;
        const double d = reduced_cost(j, y);
        int dir = 0;
        double score = 0.0;
        const bool at_lo = !at_upper_[j];
        if (at_lo && d < -kCostTol && hi_[j] > value_[j]) { dir = +1; score = d; }
        else if (!at_lo && d > kCostTol && lo_[j] < value_[j]) { dir = -1; score = -d; }
        else if (lo_[j] == -kInf && hi_[j] == kInf && std::abs(d) > kCostTol) {
          dir = d < 0.0 ? +1 : -1;
          score = -std::abs(d);
        }
        if (dir == 0) continue;
        if (bland) { enter = j; enter_dir = dir; break; }
        if (score < best) { best = score; enter = j; enter_dir = dir; }
      }
      if (enter == total_) return Status::Optimal;

      // Direction through the basis: t = B^-1 a_enter.
      std::vector<double> t(m_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < m_; ++k) v += binv_[i][k] * col_[enter][k];
        t[i] = v;
      }

      // Ratio test. Entering moves by step >= 0 in direction enter_dir;
      // basic j = basis_[i] moves by -enter_dir * t[i] * step.
      double limit = kInf;
      if (enter_dir > 0 && hi_[enter] < kInf) limit = hi_[enter] - value_[enter];
      if (enter_dir < 0 && lo_[enter] > -kInf) limit = value_[enter] - lo_[enter];
      std::size_t leave_pos = m_;  // m_ means bound flip / none
      double step = limit;
      for (std::size_t i = 0; i < m_; ++i) {
        const double rate = -static_cast<double>(enter_dir) * t[i];
        if (std::abs(rate) < kPivotTol) continue;
        const std::size_t bj = basis_[i];
        double room;
        if (rate > 0.0)
          room = hi_[bj] < kInf ? (hi_[bj] - value_[bj]) / rate : kInf;
        else
          room = lo_[bj] > -kInf ? (lo_[bj] - value_[bj]) / rate : kInf;
        room = std::max(room, 0.0);
        // Strictly smaller room wins; near-ties go to the lowest variable
        // index, which is what Bland's rule needs for termination.
        const bool better = room < step - kPivotTol;
        const bool tie = std::abs(room - step) <= kPivotTol && leave_pos < m_ &&
                         basis_[i] < basis_[leave_pos];
        if (better || tie) {
          step = std::min(step, room);
          leave_pos = i;
        }
      }

      if (step == kInf) {
        if (phase1) throw NumericalFailure("phase one unbounded");
        return Status::Unbounded;
      }

      ++iterations_;
      ++since_refactor;

      // Apply the move.
      value_[enter] += enter_dir * step;
      for (std::size_t i = 0; i < m_; ++i)
        value_[basis_[i]] -= enter_dir * t[i] * step;

      if (leave_pos == m_) {
        // Bound flip: entering stays nonbasic at its other bound.
        at_upper_[enter] = enter_dir > 0;
        continue;
      }

      const std::size_t leave = basis_[leave_pos];
      const double rate = -static_cast<double>(enter_dir) * t[leave_pos];
      at_upper_[leave] = rate > 0.0;
      value_[leave] = at_upper_[leave] ? hi_[leave] : lo_[leave];
      basic_[leave] = false;
      basic_[enter] = true;
      basis_[leave_pos] = enter;

      // Product-form update of B^-1, refactorized periodically.
      const double piv = t[leave_pos];
      if (std::abs(piv) < kPivotTol) {
        refactorize();
        continue;
      }
      for (std::size_t k = 0; k < m_; ++k) binv_[leave_pos][k] /= piv;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == leave_pos || t[i] == 0.0) continue;
        const double f = t[i];
        for (std::size_t k = 0; k < m_; ++k) binv_[i][k] -= f * binv_[leave_pos][k];
      }
      if (since_refactor >= kRefactorEvery) {
        refactorize();
        since_refactor = 0;
      }
    }
  }

  void compute_duals(LpResult& res) const {
    const auto y = prices();
    const double sgn = lp_.sense == Sense::Max ? -1.0 : 1.0;
    res.dual.assign(lp_.num_rows(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) res.dual[live_rows_[i]] = sgn * y[i];
    res.reduced_costs.assign(n_, 0.0);
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < m_; ++i) dual_obj += y[i] * lp_.rhs[live_rows_[i]];
    for (std::size_t j = 0; j < total_; ++j) {
      const double d = reduced_cost(j, y);
      if (j < n_) res.reduced_costs[j] = sgn * d;
      if (!basic_[j] && value_[j] != 0.0) dual_obj += d * value_[j];
    }
    res.dual_objective = sgn * dual_obj;
  }

  const LinearProgram& lp_;
  std::size_t n_ = 0, m_ = 0, total_ = 0;
  std::size_t slack_begin_ = 0, art_begin_ = 0, num_artificial_ = 0;
  bool zero_row_infeasible_ = false;
  std::vector<std::size_t> live_rows_;
  std::vector<std::vector<double>> col_;   // column-major constraint matrix
  std::vector<double> cost_, work_cost_, lo_, hi_, value_;
  std::vector<bool> at_upper_, basic_;
  std::vector<std::size_t> basis_;
  std::vector<std::vector<double>> binv_;
  std::size_t iterations_ = 0;

 public:
  bool zero_row_infeasible() const { return zero_row_infeasible_; }
};

}  // namespace

std::size_t LinearProgram::add_var(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  for (auto& r : rows) r.push_back(0.0);
  return objective.size() - 1;
}

void LinearProgram::add_row(std::vector<double> coeffs, Rel rel, double rhs_value) {
  if (coeffs.size() != num_vars()) throw Malformed("row length != variable count");
  rows.push_back(std::move(coeffs));
  relations.push_back(rel);
  rhs.push_back(rhs_value);
}

void LinearProgram::validate() const {
  const std::size_t n = num_vars();
  if (!lower.empty() && lower.size() != n) throw Malformed("lower bound count");
  if (!upper.empty() && upper.size() != n) throw Malformed("upper bound count");
  if (rows.size() != relations.size() || rows.size() != rhs.size())
    throw Malformed("row/relation/rhs counts differ");
  for (const auto& r : rows)
    if (r.size() != n) throw Malformed("row length != variable count");
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lower.empty() ? 0.0 : lower[j];
    const double hi = upper.empty() ? kInf : upper[j];
    if (lo > hi) throw Malformed("variable bounds cross");
  }
  for (std::size_t j = 0; j < n; ++j)
    if (!std::isfinite(objective[j])) throw Malformed("objective must be finite");
  for (const auto& r : rows)
    for (double a : r)
      if (!std::isfinite(a)) throw Malformed("constraint coefficients must be finite");
  for (double b : rhs)
    if (!std::isfinite(b)) throw Malformed("rhs must be finite");
}

LpResult solve(const LinearProgram& lp) {
  lp.validate();
  if (g_dump) dump(lp, *g_dump);
  Simplex s(lp);
  if (s.zero_row_infeasible()) {
    LpResult res;
    res.status = Status::Infeasible;
    return res;
  }
  return s.run();
}

std::pair<bool, std::optional<std::vector<double>>> feasible(
    const std::vector<std::vector<double>>& rows, const std::vector<Rel>& relations,
    const std::vector<double>& rhs, const std::vector<double>& lower,
    const std::vector<double>& upper) {
  LinearProgram lp;
  lp.sense = Sense::Min;
  lp.objective.assign(rows.empty() ? lower.size() : rows.front().size(), 0.0);
  lp.rows = rows;
  lp.relations = relations;
  lp.rhs = rhs;
  lp.lower = lower;
  lp.upper = upper;
  const LpResult r = solve(lp);
  if (r.status != Status::Optimal) return {false, std::nullopt};
  return {true, r.primal};
}

void set_debug_dump(std::ostream* sink) { g_dump = sink; }

void dump(const LinearProgram& lp, std::ostream& os) {
  os << (lp.sense == Sense::Min ? "min" : "max");
  for (double c : lp.objective) os << ' ' << c;
  os << '\n';
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    os << "  ";
    for (double a : lp.rows[i]) os << std::setw(12) << a;
    os << (lp.relations[i] == Rel::LE ? " <= " : lp.relations[i] == Rel::EQ ? " == " : " >= ");
    os << lp.rhs[i] << '\n';
  }
  os << "  bounds:";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower.empty() ? 0.0 : lp.lower[j];
    const double hi = lp.upper.empty() ? kInf : lp.upper[j];
    os << " [" << lo << ',' << hi << ']';
  }
  os << '\n';
}

}  // namespace kantor::lp
