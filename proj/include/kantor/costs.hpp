#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "kantor/lp.hpp"
#include "kantor/measure.hpp"

namespace kantor::costs {

// Linear constraint  coeffs . sigma (rel) rhs  on measures over Y.
struct LinearConstraint {
  std::vector<double> coeffs;
  lp::Rel rel = lp::Rel::LE;
  double rhs = 0.0;
};

// A polytope D(x) inside P(Y): the simplex intersected with linear
// constraints and/or the convex hull of an explicit vertex list. Both
// present means the intersection.
struct Polytope {
  std::vector<LinearConstraint> constraints;
  std::optional<std::vector<std::vector<double>>> vertices;

  bool trivial() const { return constraints.empty() && !vertices.has_value(); }
};

Polytope barycenter_polytope(const SpacePtr& y, const std::vector<double>& target);
Polytope singleton_polytope(const Measure& sigma);

struct AffinePiece {
  std::vector<double> slope;
  double intercept = 0.0;
};

// --- the five closed families -----------------------------------------------
struct Linear {
  std::vector<std::vector<ExtReal>> matrix;  // c(x,y), +inf allowed
};
struct BarycentricPL {
  std::vector<std::vector<AffinePiece>> pieces;  // theta(x,.) = max of affine, per x
};
struct BarycentricQuad {
  double scale = 1.0;  // theta(x,m) = scale/2 * |m - coords(x)|^2
};
struct Dilation {
  std::vector<Polytope> per_x;  // cost 0 on D(x), +inf outside
};
struct EntropicShift {
  std::vector<std::vector<ExtReal>> base;
  double eps = 1.0;
  std::vector<double> ref;  // strictly positive reference on Y
};
class WeakCost;
struct Sum {
  std::vector<WeakCost> terms;
};

// A weak-transport cost family c : X x P(Y) -> R u {+inf}, convex in the
// measure argument by construction. Immutable.
class WeakCost {
 public:
  using Variant = std::variant<Linear, BarycentricPL, BarycentricQuad, Dilation, EntropicShift, Sum>;

  static WeakCost linear(SpacePtr x, SpacePtr y, std::vector<std::vector<ExtReal>> matrix);
  static WeakCost linear_finite(SpacePtr x, SpacePtr y,
                                const std::vector<std::vector<double>>& matrix);
  static WeakCost barycentric_pl(SpacePtr x, SpacePtr y,
                                 std::vector<std::vector<AffinePiece>> pieces);
  static WeakCost barycentric_quad(SpacePtr x, SpacePtr y, double scale);
  static WeakCost dilation(SpacePtr x, SpacePtr y, std::vector<Polytope> per_x);
  static WeakCost entropic(SpacePtr x, SpacePtr y, std::vector<std::vector<ExtReal>> base,
                           double eps, std::vector<double> ref);
  static WeakCost sum(std::vector<WeakCost> terms);

  const SpacePtr& x_space() const { return x_space_; }
  const SpacePtr& y_space() const { return y_space_; }
  const Variant& node() const { return *node_; }

  // dom c(x,.) nonempty, decided at construction (one feasibility LP per x
  // for Dilation and Sum).
  const std::vector<bool>& standard_at() const { return standard_at_; }
  bool standard() const;

  // No quadratic or entropic term anywhere: every evaluation is one LP.
  bool lp_representable() const;

  // The cost of the scaled operator (lambda . T): c / lambda.
  WeakCost scaled(double lambda) const;

 private:
  WeakCost(SpacePtr x, SpacePtr y, Variant v);
  SpacePtr x_space_;
  SpacePtr y_space_;
  std::shared_ptr<const Variant> node_;
  std::vector<bool> standard_at_;
};

// Exact evaluation; +inf when sigma is outside the domain. KL terms use the
// 0 log 0 = 0 convention.
ExtReal eval_cost(const WeakCost& c, std::size_t x, const Measure& sigma);

struct MaximizeResult {
  ExtReal value;
  std::optional<Measure> argmax;
  bool infeasible = false;       // dom c(x,.) empty; value is -inf
  double certificate_gap = 0.0;  // residual duality gap of iterative solves
};

// sup over sigma in P(Y) of  g.sigma - c(x, sigma), with a maximizer.
// Dispatch: Linear takes the best column, Dilation and LP-representable
// sums turn into one LP, EntropicShift has the closed-form Gibbs measure,
// quadratic and mixed families run Frank-Wolfe on the simplex.
MaximizeResult maximize_linear_minus_cost(const WeakCost& c, std::size_t x, const Fn& g);

// Same objective, forced through the Frank-Wolfe path (cross-checks the
// closed forms).
MaximizeResult maximize_via_fw(const WeakCost& c, std::size_t x, const Fn& g,
                               double tol = 1e-8, std::size_t cap = 10000);

// sup over dom c(x,.) of g.sigma: the support function of the domain,
// i.e. the recession operator pointwise.
MaximizeResult support_value(const WeakCost& c, std::size_t x, const Fn& g);

// The domain of c(x,.) as an explicit polytope.
Polytope domain_polytope(const WeakCost& c, std::size_t x);

// Membership of a (sub)probability vector in P ∩ simplex-slice, within tol.
bool polytope_contains(const Polytope& p, const std::vector<double>& sigma, double tol);

// max obj.sigma over P ∩ P(Y); infeasible flag when the region is empty.
MaximizeResult maximize_over_polytope(const Polytope& p, const SpacePtr& y,
                                      const std::vector<double>& obj);

// A strictly-inside feasible point of P ∩ P(Y) (max-min-coordinate LP),
// used to seed iterative methods.
std::optional<std::vector<double>> interior_point(const Polytope& p, const SpacePtr& y);

// Enumerate the vertices of P ∩ P(Y). 1-D barycenter constraints use the
// straddling-pair construction; otherwise exhaustive basis enumeration,
// capped (SizeCap) to keep the combinatorics bounded.
std::vector<std::vector<double>> enumerate_vertices(const Polytope& p, const SpacePtr& y,
                                                    std::size_t cap = 12);

// --- LP assembly hooks -------------------------------------------------------
// Contribute  mass * c(x, row/mass)  for a row block of variables R_x
// (row_vars) to `prog`: linear costs land in the objective, +inf entries fix
// variables to zero, dilation constraints become homogeneous rows, PL terms
// add perspective epigraph variables. Requires lp_representable().
void add_row_cost_to_lp(const WeakCost& c, std::size_t x, lp::LinearProgram& prog,
                        const std::vector<std::size_t>& row_vars);

// Only the domain restrictions of c(x,.), no objective terms.
void add_row_domain_to_lp(const WeakCost& c, std::size_t x, lp::LinearProgram& prog,
                          const std::vector<std::size_t>& row_vars);

// Generic polytope membership rows for  R_x ∈ mass(R_x) * P.
void add_polytope_rows(const Polytope& p, lp::LinearProgram& prog,
                       const std::vector<std::size_t>& row_vars);

}  // namespace kantor::costs
