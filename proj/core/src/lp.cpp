#include "meddis/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "meddis/instance.hpp"

namespace meddis {

int LinearProgram::add_variable(double lo, double hi, double cost) {
  lower.push_back(lo);
  upper.push_back(hi);
  objective.push_back(cost);
  return num_vars++;
}

void LinearProgram::add_constraint(std::vector<std::pair<int, double>> terms, Relation relation,
                                   double rhs) {
  constraints.push_back({std::move(terms), relation, rhs});
}

double LinearProgram::row_activity(std::size_t row, const std::vector<double>& values) const {
  double act = 0.0;
  for (const auto& [var, coef] : constraints[row].terms) act += coef * values[var];
  return act;
}

double LinearProgram::evaluate(const std::vector<double>& values) const {
  double total = objective_offset;
  for (int v = 0; v < num_vars; ++v) total += objective[v] * values[v];
  return total;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTolerance = 1e-9;
constexpr double kCostTolerance = 1e-9;
constexpr int kMaxIterations = 200000;

enum class ColumnState : unsigned char { kBasic, kAtLower, kAtUpper };

class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp) : lp_(lp) {
    n_ = lp.num_vars;
    m_ = static_cast<int>(lp.constraints.size());
    if (static_cast<int>(lp.objective.size()) != n_ || static_cast<int>(lp.lower.size()) != n_ ||
        static_cast<int>(lp.upper.size()) != n_)
      throw Error("lp: objective and bound vectors must have num_vars entries");
    for (int v = 0; v < n_; ++v) {
      if (!std::isfinite(lp.lower[v]) || !std::isfinite(lp.upper[v]))
        throw Error("lp: variable bounds must be finite");
      if (lp.lower[v] > lp.upper[v]) throw Error("lp: lower bound exceeds upper bound");
    }
    for (const auto& row : lp.constraints)
      for (const auto& [var, coef] : row.terms)
        if (var < 0 || var >= n_) throw Error("lp: constraint references an unknown variable");
    build();
  }

  LpResult run() {
    LpResult result;
    if (num_artificial_ > 0) {
      std::vector<double> cost(ncol_, 0.0);
      for (int c = first_artificial(); c < ncol_; ++c) cost[c] = 1.0;
      if (!optimize(cost, result.iterations)) throw Error("lp: phase one reported unbounded");
      double infeasibility = 0.0;
      for (int c = first_artificial(); c < ncol_; ++c) infeasibility += value_[c];
      if (infeasibility > kFeasibilityTolerance) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
      drive_out_artificials();
    }
    std::vector<double> cost(ncol_, 0.0);
    for (int v = 0; v < n_; ++v) cost[v] = lp_.objective[v];
    if (!optimize(cost, result.iterations)) {
      result.status = LpStatus::kUnbounded;
      return result;
    }
    refine_values();
    result.status = LpStatus::kOptimal;
    result.solution = extract();
    return result;
  }

 private:
  int first_artificial() const { return n_ + m_; }
  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * ncol_ + c]; }
  double at(int r, int c) const { return t_[static_cast<std::size_t>(r) * ncol_ + c]; }

  void build() {
    // Structural columns start at their lower bounds; each row gets a slack
    // whose range encodes the relation, plus an artificial if the slack
    // alone cannot absorb the initial residual.
    lo_.assign(n_ + m_, 0.0);
    hi_.assign(n_ + m_, 0.0);
    for (int v = 0; v < n_; ++v) {
      lo_[v] = lp_.lower[v];
      hi_[v] = lp_.upper[v];
    }
    std::vector<double> residual(m_);
    std::vector<double> x(n_);
    for (int v = 0; v < n_; ++v) x[v] = lo_[v];
    std::vector<int> needs_artificial;
    for (int r = 0; r < m_; ++r) {
      const auto& row = lp_.constraints[r];
      const int s = n_ + r;
      switch (row.relation) {
        case Relation::kLessEqual: lo_[s] = 0.0; hi_[s] = kInf; break;
        case Relation::kGreaterEqual: lo_[s] = -kInf; hi_[s] = 0.0; break;
        case Relation::kEqual: lo_[s] = 0.0; hi_[s] = 0.0; break;
      }
      residual[r] = row.rhs - lp_.row_activity(r, x);
      if (residual[r] < lo_[s] || residual[r] > hi_[s]) needs_artificial.push_back(r);
    }
    num_artificial_ = static_cast<int>(needs_artificial.size());
    ncol_ = n_ + m_ + num_artificial_;
    for (int a = 0; a < num_artificial_; ++a) {
      lo_.push_back(0.0);
      hi_.push_back(kInf);
    }
    t_.assign(static_cast<std::size_t>(m_) * ncol_, 0.0);
    value_.assign(ncol_, 0.0);
    state_.assign(ncol_, ColumnState::kAtLower);
    basis_.assign(m_, -1);
    for (int v = 0; v < n_; ++v) value_[v] = lo_[v];

    std::vector<int> artificial_of(m_, -1);
    for (int a = 0; a < num_artificial_; ++a) artificial_of[needs_artificial[a]] = first_artificial() + a;
    for (int r = 0; r < m_; ++r) {
      const auto& row = lp_.constraints[r];
      const int s = n_ + r;
      for (const auto& [var, coef] : row.terms) at(r, var) += coef;
      at(r, s) = 1.0;
      const int art = artificial_of[r];
      if (art < 0) {
        basis_[r] = s;
        state_[s] = ColumnState::kBasic;
        value_[s] = residual[r];
        continue;
      }
      // Slack parked at 0, which is a finite bound for every relation.
      value_[s] = 0.0;
      state_[s] = (hi_[s] == 0.0 && lo_[s] != 0.0) ? ColumnState::kAtUpper : ColumnState::kAtLower;
      const double sign = residual[r] > 0.0 ? 1.0 : -1.0;
      at(r, art) = sign;
      if (sign < 0.0)
        for (int c = 0; c < ncol_; ++c) at(r, c) = -at(r, c);
      basis_[r] = art;
      state_[art] = ColumnState::kBasic;
      value_[art] = std::abs(residual[r]);
    }
  }

  bool enterable(int c) const {
    if (state_[c] == ColumnState::kBasic) return false;
    if (c >= first_artificial()) return false;
    return lo_[c] < hi_[c];
  }

  // Runs simplex iterations for the given costs. Returns false if unbounded.
  bool optimize(const std::vector<double>& cost, int& iterations) {
    std::vector<double> d(cost);
    for (int r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (int c = 0; c < ncol_; ++c) d[c] -= cb * at(r, c);
    }
    while (true) {
      if (++iterations > kMaxIterations) throw Error("lp: iteration limit exceeded");
      int enter = -1;
      for (int c = 0; c < ncol_; ++c) {
        if (!enterable(c)) continue;
        if ((state_[c] == ColumnState::kAtLower && d[c] < -kCostTolerance) ||
            (state_[c] == ColumnState::kAtUpper && d[c] > kCostTolerance)) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;
      const double dir = state_[enter] == ColumnState::kAtLower ? 1.0 : -1.0;

      double theta = hi_[enter] - lo_[enter];
      int leave_row = -1;
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (std::abs(a) <= kPivotTolerance) continue;
        const int b = basis_[r];
        const double rate = -dir * a;  // change of x_b per unit step
        double limit;
        if (rate < 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          limit = (value_[b] - lo_[b]) / -rate;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          limit = (hi_[b] - value_[b]) / rate;
        }
        limit = std::max(limit, 0.0);
        // Bland: among tied ratios the basic column with the smallest index leaves.
        const double tie = 1e-12 * std::max(1.0, limit);
        const bool take = leave_row < 0
                              ? limit <= theta + tie
                              : (limit < theta - tie || (limit <= theta + tie && b < basis_[leave_row]));
        if (take) {
          theta = std::min(theta, limit);
          leave_row = r;
        }
      }
      if (!std::isfinite(theta)) return false;

      value_[enter] += dir * theta;
      for (int r = 0; r < m_; ++r) value_[basis_[r]] -= dir * theta * at(r, enter);

      if (leave_row < 0) {
        state_[enter] = state_[enter] == ColumnState::kAtLower ? ColumnState::kAtUpper : ColumnState::kAtLower;
        value_[enter] = state_[enter] == ColumnState::kAtLower ? lo_[enter] : hi_[enter];
        continue;
      }
      const int leave = basis_[leave_row];
      const double rate = -dir * at(leave_row, enter);
      if (rate < 0.0) {
        state_[leave] = ColumnState::kAtLower;
        value_[leave] = lo_[leave];
      } else {
        state_[leave] = ColumnState::kAtUpper;
        value_[leave] = hi_[leave];
      }
      pivot(leave_row, enter, d);
    }
  }

  void pivot(int row, int col, std::vector<double>& d) {
    double* pr = &t_[static_cast<std::size_t>(row) * ncol_];
    const double inv = 1.0 / pr[col];
    for (int c = 0; c < ncol_; ++c) pr[c] *= inv;
    pr[col] = 1.0;
    for (int r = 0; r < m_; ++r) {
      if (r == row) continue;
      double* rr = &t_[static_cast<std::size_t>(r) * ncol_];
      const double f = rr[col];
      if (f == 0.0) continue;
      for (int c = 0; c < ncol_; ++c) rr[c] -= f * pr[c];
      rr[col] = 0.0;
    }
    const double fd = d[col];
    if (fd != 0.0) {
      for (int c = 0; c < ncol_; ++c) d[c] -= fd * pr[c];
      d[col] = 0.0;
    }
    basis_[row] = col;
    state_[col] = ColumnState::kBasic;
  }

  void drive_out_artificials() {
    std::vector<double> unused(ncol_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const int b = basis_[r];
      if (b < first_artificial()) continue;
      int best = -1;
      double best_mag = kPivotTolerance;
      for (int c = 0; c < first_artificial(); ++c) {
        if (state_[c] == ColumnState::kBasic) continue;
        if (std::abs(at(r, c)) > best_mag) {
          best_mag = std::abs(at(r, c));
          best = c;
        }
      }
      if (best < 0) throw Error("lp: could not remove an artificial variable from the basis");
      value_[b] = 0.0;
      state_[b] = ColumnState::kAtLower;
      pivot(r, best, unused);
    }
  }

  // Recomputes basic values from the final basis by a fresh factorization.
  void refine_values() {
    if (m_ == 0) return;
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
    Eigen::VectorXd rhs(m_);
    std::vector<int> position(ncol_, -1);
    for (int r = 0; r < m_; ++r) position[basis_[r]] = r;
    for (int r = 0; r < m_; ++r) {
      const auto& row = lp_.constraints[r];
      double b = row.rhs;
      for (const auto& [var, coef] : row.terms) {
        if (position[var] >= 0) basis_matrix(r, position[var]) += coef;
        else b -= coef * value_[var];
      }
      const int s = n_ + r;
      if (position[s] >= 0) basis_matrix(r, position[s]) += 1.0;
      else b -= value_[s];
      rhs(r) = b;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (int r = 0; r < m_; ++r) {
      const int c = basis_[r];
      double v = xb(r);
      if (v < lo_[c] && lo_[c] - v <= kFeasibilityTolerance) v = lo_[c];
      if (v > hi_[c] && v - hi_[c] <= kFeasibilityTolerance) v = hi_[c];
      value_[c] = v;
    }
  }

  BasicOptimal extract() const {
    BasicOptimal out;
    out.values.assign(value_.begin(), value_.begin() + n_);
    out.objective_value = lp_.evaluate(out.values);
    for (int r = 0; r < m_; ++r) {
      const double act = lp_.row_activity(r, out.values);
      if (std::abs(act - lp_.constraints[r].rhs) <= kFeasibilityTolerance) out.tight_rows.push_back(r);
    }
    for (int c = 0; c < n_ + m_; ++c) {
      if (state_[c] == ColumnState::kBasic) continue;
      if (c < n_) {
        out.basis_certificate.push_back({state_[c] == ColumnState::kAtUpper && lo_[c] != hi_[c]
                                             ? TightConstraint::Kind::kUpperBound
                                             : TightConstraint::Kind::kLowerBound,
                                         c});
      } else {
        out.basis_certificate.push_back({TightConstraint::Kind::kRow, c - n_});
      }
    }
    return out;
  }

  const LinearProgram& lp_;
  int n_ = 0, m_ = 0, ncol_ = 0, num_artificial_ = 0;
  std::vector<double> t_;
  std::vector<double> lo_, hi_, value_;
  std::vector<ColumnState> state_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve(const LinearProgram& lp) {
  Tableau tableau(lp);
  LpResult result = tableau.run();
  if (result.optimal()) {
    const VertexAudit audit = audit_vertex(lp, result.solution);
    if (audit.max_violation > kFeasibilityTolerance)
      throw Error("lp: returned point violates constraints by " + std::to_string(audit.max_violation));
  }
  return result;
}

VertexAudit audit_vertex(const LinearProgram& lp, const BasicOptimal& point, double tol) {
  VertexAudit audit;
  const int n = lp.num_vars;
  const auto& x = point.values;
  for (int v = 0; v < n; ++v) {
    audit.max_violation = std::max({audit.max_violation, lp.lower[v] - x[v], x[v] - lp.upper[v]});
    if (x[v] > lp.lower[v] + tol && x[v] < lp.upper[v] - tol) ++audit.strictly_inside;
  }
  std::vector<int> tight;
  for (std::size_t r = 0; r < lp.constraints.size(); ++r) {
    const auto& row = lp.constraints[r];
    const double act = lp.row_activity(r, x);
    double viol = 0.0;
    switch (row.relation) {
      case Relation::kLessEqual: viol = act - row.rhs; break;
      case Relation::kGreaterEqual: viol = row.rhs - act; break;
      case Relation::kEqual: viol = std::abs(act - row.rhs); break;
    }
    audit.max_violation = std::max(audit.max_violation, viol);
    if (std::abs(act - row.rhs) <= tol) tight.push_back(static_cast<int>(r));
  }

  auto row_vector = [&](int r) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(n);
    for (const auto& [var, coef] : lp.constraints[r].terms) v(var) += coef;
    return v;
  };

  if (n == 0) {
    audit.is_vertex = true;
    return audit;
  }
  const auto& cert = point.basis_certificate;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<int>(cert.size()), n);
  for (std::size_t k = 0; k < cert.size(); ++k) {
    const auto& t = cert[k];
    double residual = 0.0;
    if (t.kind == TightConstraint::Kind::kRow) {
      m.row(static_cast<int>(k)) = row_vector(t.index);
      residual = std::abs(lp.row_activity(t.index, x) - lp.constraints[t.index].rhs);
    } else {
      m(static_cast<int>(k), t.index) = 1.0;
      const double bound = t.kind == TightConstraint::Kind::kLowerBound ? lp.lower[t.index] : lp.upper[t.index];
      residual = std::abs(x[t.index] - bound);
    }
    audit.certificate_residual = std::max(audit.certificate_residual, residual);
  }
  if (!cert.empty()) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-9);
    audit.certificate_rank = static_cast<int>(lu.rank());
  }
  if (!tight.empty()) {
    Eigen::MatrixXd rows(static_cast<int>(tight.size()), n);
    for (std::size_t k = 0; k < tight.size(); ++k) rows.row(static_cast<int>(k)) = row_vector(tight[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
    lu.setThreshold(1e-9);
    audit.independent_tight_rows = static_cast<int>(lu.rank());
  }
  audit.is_vertex = static_cast<int>(cert.size()) == n && audit.certificate_rank == n &&
                    audit.certificate_residual <= tol &&
                    audit.strictly_inside <= audit.independent_tight_rows;
  return audit;
}

}  // namespace meddis
