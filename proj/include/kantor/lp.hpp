#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kantor/errors.hpp"

namespace kantor::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Rel : unsigned char { LE, EQ, GE };
enum class Sense : unsigned char { Min, Max };
enum class Status : unsigned char { Optimal, Infeasible, Unbounded };

// Dense LP:   optimize c.x   s.t.  A x (rel) b,   lo <= x <= up.
// Bounds may be +-infinity (bounds are solver metadata, not data values).
struct LinearProgram {
  Sense sense = Sense::Min;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Rel> relations;
  std::vector<double> rhs;
  std::vector<double> lower;  // default 0
  std::vector<double> upper;  // default +inf

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  // Builder conveniences.
  std::size_t add_var(double cost, double lo = 0.0, double hi = kInf);
  void add_row(std::vector<double> coeffs, Rel rel, double rhs_value);
  void validate() const;  // throws Malformed
};

struct LpResult {
  Status status = Status::Infeasible;
  std::vector<double> primal;
  std::vector<double> dual;           // one multiplier per row (original sense)
  std::vector<double> reduced_costs;  // per variable (original sense)
  double objective = 0.0;
  double dual_objective = 0.0;  // rhs.dual + active-bound terms
  std::size_t iterations = 0;

  bool optimal() const { return status == Status::Optimal; }
};

// Dense revised simplex. Deterministic: Dantzig pricing with lowest-index
// tie-breaking, Bland's rule engaged after 3*(rows+cols) iterations so the
// method terminates on degenerate instances. Equalities are handled by
// phase-one artificials; the only presolve is dropping all-zero rows.
LpResult solve(const LinearProgram& lp);

// Phase-one feasibility of  A x (rel) b,  lo <= x <= up.
std::pair<bool, std::optional<std::vector<double>>> feasible(
    const std::vector<std::vector<double>>& rows, const std::vector<Rel>& relations,
    const std::vector<double>& rhs, const std::vector<double>& lower,
    const std::vector<double>& upper);

// Plain-text tableau dump of every solved LP, for debugging; enabled by the
// CLI --dump-lp flag. Pass nullptr to disable.
void set_debug_dump(std::ostream* sink);
void dump(const LinearProgram& lp, std::ostream& os);

}  // namespace kantor::lp
