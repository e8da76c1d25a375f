#pragma once

// Dense two-phase simplex returning basic optimal solutions (vertices).
//
// Variables carry finite bounds. Rows are <=, = or >= constraints; equality
// rows enter the tableau directly with a fixed slack, so the basis of the
// returned point counts each equality once. Pivoting follows Bland's rule,
// which makes the result a deterministic function of the input.

#include <string>
#include <utility>
#include <vector>

namespace meddis {

inline constexpr double kFeasibilityTolerance = 1e-7;

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct LinearConstraint {
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;  // minimized
  double objective_offset = 0.0;
  std::vector<LinearConstraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  int add_variable(double lo, double hi, double cost = 0.0);
  void add_constraint(std::vector<std::pair<int, double>> terms, Relation relation, double rhs);
  double row_activity(std::size_t row, const std::vector<double>& values) const;
  double evaluate(const std::vector<double>& values) const;
};

// One member of a basis certificate: either a variable sitting at a bound or
// a constraint row holding with equality.
struct TightConstraint {
  enum class Kind { kLowerBound, kUpperBound, kRow };
  Kind kind;
  int index;  // variable index for bounds, row index for rows
  bool operator==(const TightConstraint&) const = default;
};

struct BasicOptimal {
  std::vector<double> values;
  double objective_value = 0.0;
  std::vector<int> tight_rows;
  // num_vars linearly independent tight constraints whose unique common
  // solution is `values`.
  std::vector<TightConstraint> basis_certificate;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  BasicOptimal solution;  // meaningful only when optimal
  int iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

LpResult solve(const LinearProgram& lp);

const char* to_string(LpStatus status);

struct VertexAudit {
  double max_violation = 0.0;      // worst bound or row violation
  int certificate_rank = 0;        // rank of the certificate rows
  double certificate_residual = 0.0;  // max |a.x - b| over certificate members
  int strictly_inside = 0;         // variables strictly between their bounds
  int independent_tight_rows = 0;  // rank of tight non-bound rows
  bool is_vertex = false;
};

// Independent post-hoc check of a returned point: feasibility, rank of the
// certificate, and the vertex counting property.
VertexAudit audit_vertex(const LinearProgram& lp, const BasicOptimal& point, double tol = kFeasibilityTolerance);

}  // namespace meddis
