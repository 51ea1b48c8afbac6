#include "kantor/costs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace kantor::costs {

namespace {

constexpr double kDomainTol = 1e-9;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// theta_j as a row over sigma: sum_y (slope . coord_y + intercept) sigma_y.
// This is the perspective form shared by the LP builders below.
std::vector<double> piece_row(const AffinePiece& piece, const Space& y) {
  std::vector<double> w(y.size(), piece.intercept);
  for (std::size_t j = 0; j < y.size(); ++j) w[j] += dot(piece.slope, y.coord(j));
  return w;
}

}  // namespace

Polytope barycenter_polytope(const SpacePtr& y, const std::vector<double>& target) {
  if (!y->has_coords()) throw NoEmbedding("barycenter polytope needs coordinates");
  if (target.size() != y->dim()) throw DimensionMismatch("barycenter target dimension");
  Polytope p;
  for (std::size_t k = 0; k < y->dim(); ++k) {
    LinearConstraint c;
    c.coeffs.resize(y->size());
    for (std::size_t j = 0; j < y->size(); ++j) c.coeffs[j] = y->coord(j)[k];
    c.rel = lp::Rel::EQ;
    c.rhs = target[k];
    p.constraints.push_back(std::move(c));
  }
  return p;
}

Polytope singleton_polytope(const Measure& sigma) {
  Polytope p;
  p.vertices = {{sigma.weights()}};
  return p;
}

// --- WeakCost construction ---------------------------------------------------

WeakCost::WeakCost(SpacePtr x, SpacePtr y, Variant v)
    : x_space_(std::move(x)),
      y_space_(std::move(y)),
      node_(std::make_shared<const Variant>(std::move(v))) {}

WeakCost WeakCost::linear(SpacePtr x, SpacePtr y, std::vector<std::vector<ExtReal>> matrix) {
  if (matrix.size() != x->size()) throw DimensionMismatch("cost rows != |X|");
  for (const auto& row : matrix) {
    if (row.size() != y->size()) throw DimensionMismatch("cost cols != |Y|");
    for (const auto& v : row)
      if (v.is_neg_inf()) throw Malformed("linear cost entries must not be -inf");
  }
  WeakCost c(std::move(x), std::move(y), Linear{std::move(matrix)});
  const auto& m = std::get<Linear>(*c.node_).matrix;
  c.standard_at_.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    c.standard_at_[i] =
        std::any_of(m[i].begin(), m[i].end(), [](ExtReal v) { return v.finite(); });
  return c;
}

WeakCost WeakCost::linear_finite(SpacePtr x, SpacePtr y,
                                 const std::vector<std::vector<double>>& matrix) {
  std::vector<std::vector<ExtReal>> m(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i)
    m[i].assign(matrix[i].begin(), matrix[i].end());
  return linear(std::move(x), std::move(y), std::move(m));
}

WeakCost WeakCost::barycentric_pl(SpacePtr x, SpacePtr y,
                                  std::vector<std::vector<AffinePiece>> pieces) {
  if (!y->has_coords()) throw NoEmbedding("barycentric cost needs Y coordinates");
  if (pieces.size() != x->size()) throw DimensionMismatch("pieces count != |X|");
  for (const auto& px : pieces) {
    if (px.empty()) throw Malformed("each x needs at least one affine piece");
    for (const auto& piece : px)
      if (piece.slope.size() != y->dim()) throw DimensionMismatch("piece slope dimension");
  }
  WeakCost c(std::move(x), std::move(y), BarycentricPL{std::move(pieces)});
  c.standard_at_.assign(c.x_space_->size(), true);
  return c;
}

WeakCost WeakCost::barycentric_quad(SpacePtr x, SpacePtr y, double scale) {
  if (!x->has_coords() || !y->has_coords()) throw NoEmbedding("quadratic cost needs coordinates");
  if (x->dim() != y->dim()) throw DimensionMismatch("X and Y embeddings differ in dimension");
  if (scale <= 0.0) throw Malformed("quadratic scale must be positive");
  WeakCost c(std::move(x), std::move(y), BarycentricQuad{scale});
  c.standard_at_.assign(c.x_space_->size(), true);
  return c;
}

WeakCost WeakCost::dilation(SpacePtr x, SpacePtr y, std::vector<Polytope> per_x) {
  if (per_x.size() != x->size()) throw DimensionMismatch("dilation families != |X|");
  for (const auto& p : per_x) {
    for (const auto& con : p.constraints)
      if (con.coeffs.size() != y->size()) throw DimensionMismatch("dilation constraint width");
    if (p.vertices)
      for (const auto& v : *p.vertices)
        if (v.size() != y->size()) throw DimensionMismatch("dilation vertex width");
  }
  WeakCost c(std::move(x), std::move(y), Dilation{std::move(per_x)});
  // "proper" is decided now: one feasibility LP per x.
  const auto& d = std::get<Dilation>(*c.node_);
  c.standard_at_.resize(d.per_x.size());
  std::vector<double> zero(c.y_space_->size(), 0.0);
  for (std::size_t i = 0; i < d.per_x.size(); ++i)
    c.standard_at_[i] = !maximize_over_polytope(d.per_x[i], c.y_space_, zero).infeasible;
  return c;
}

WeakCost WeakCost::entropic(SpacePtr x, SpacePtr y, std::vector<std::vector<ExtReal>> base,
                            double eps, std::vector<double> ref) {
  if (eps <= 0.0) throw BadEpsilon("eps must be positive, got " + std::to_string(eps));
  if (base.size() != x->size()) throw DimensionMismatch("base rows != |X|");
  for (const auto& row : base) {
    if (row.size() != y->size()) throw DimensionMismatch("base cols != |Y|");
    for (const auto& v : row)
      if (v.is_neg_inf()) throw Malformed("entropic base entries must not be -inf");
  }
  if (ref.size() != y->size()) throw DimensionMismatch("reference measure size");
  for (double r : ref)
    if (r <= 0.0) throw Malformed("reference measure must be strictly positive");
  WeakCost c(std::move(x), std::move(y), EntropicShift{std::move(base), eps, std::move(ref)});
  const auto& e = std::get<EntropicShift>(*c.node_);
  c.standard_at_.resize(e.base.size());
  for (std::size_t i = 0; i < e.base.size(); ++i)
    c.standard_at_[i] =
        std::any_of(e.base[i].begin(), e.base[i].end(), [](ExtReal v) { return v.finite(); });
  return c;
}

WeakCost WeakCost::sum(std::vector<WeakCost> terms) {
  if (terms.empty()) throw Malformed("sum of zero costs");
  for (std::size_t k = 1; k < terms.size(); ++k) {
    require_same_space(terms[0].x_space(), terms[k].x_space(), "sum cost X spaces");
    require_same_space(terms[0].y_space(), terms[k].y_space(), "sum cost Y spaces");
  }
  SpacePtr x = terms[0].x_space(), y = terms[0].y_space();
  WeakCost c(x, y, Sum{std::move(terms)});
  c.standard_at_.resize(x->size());
  std::vector<double> zero(y->size(), 0.0);
  for (std::size_t i = 0; i < x->size(); ++i) {
    const Polytope dom = domain_polytope(c, i);
    c.standard_at_[i] = dom.trivial() || !maximize_over_polytope(dom, y, zero).infeasible;
  }
  return c;
}

bool WeakCost::standard() const {
  return std::all_of(standard_at_.begin(), standard_at_.end(), [](bool b) { return b; });
}

bool WeakCost::lp_representable() const {
  return std::visit(
      [](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, BarycentricQuad> || std::is_same_v<T, EntropicShift>) {
          return false;
        } else if constexpr (std::is_same_v<T, Sum>) {
          for (const auto& t : node.terms)
            if (!t.lp_representable()) return false;
          return true;
        } else {
          return true;
        }
      },
      *node_);
}

WeakCost WeakCost::scaled(double lambda) const {
  if (lambda <= 0.0) throw NonPositiveLambda(std::to_string(lambda));
  return std::visit(
      [&](const auto& node) -> WeakCost {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Linear>) {
          auto m = node.matrix;
          for (auto& row : m)
            for (auto& v : row)
              if (v.finite()) v = ExtReal(v.value() / lambda);
          return linear(x_space_, y_space_, std::move(m));
        } else if constexpr (std::is_same_v<T, BarycentricPL>) {
          auto pieces = node.pieces;
          for (auto& px : pieces)
            for (auto& piece : px) {
              for (auto& s : piece.slope) s /= lambda;
              piece.intercept /= lambda;
            }
          return barycentric_pl(x_space_, y_space_, std::move(pieces));
        } else if constexpr (std::is_same_v<T, BarycentricQuad>) {
          return barycentric_quad(x_space_, y_space_, node.scale / lambda);
        } else if constexpr (std::is_same_v<T, Dilation>) {
          return dilation(x_space_, y_space_, node.per_x);  // 0/inf is scale-invariant
        } else if constexpr (std::is_same_v<T, EntropicShift>) {
          auto base = node.base;
          for (auto& row : base)
            for (auto& v : row)
              if (v.finite()) v = ExtReal(v.value() / lambda);
          return entropic(x_space_, y_space_, std::move(base), node.eps / lambda, node.ref);
        } else {
          static_assert(std::is_same_v<T, Sum>);
          std::vector<WeakCost> terms;
          terms.reserve(node.terms.size());
          for (const auto& t : node.terms) terms.push_back(t.scaled(lambda));
          return sum(std::move(terms));
        }
      },
      *node_);
}

// --- evaluation ---------------------------------------------------------------

ExtReal eval_cost(const WeakCost& c, std::size_t x, const Measure& sigma) {
  require_same_space(sigma.space(), c.y_space(), "eval_cost: sigma on wrong space");
  if (x >= c.x_space()->size()) throw DimensionMismatch("x index out of range");
  return std::visit(
      [&](const auto& node) -> ExtReal {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Linear>) {
          ExtReal s{0.0};
          for (std::size_t y = 0; y < sigma.size(); ++y) {
            if (sigma[y] == 0.0) continue;
            if (!node.matrix[x][y].finite()) return ExtReal::pos_inf();
            s = s + sigma[y] * node.matrix[x][y];
          }
          return s;
        } else if constexpr (std::is_same_v<T, BarycentricPL>) {
          const auto m = barycenter(sigma);
          double best = -lp::kInf;
          for (const auto& piece : node.pieces[x])
            best = std::max(best, dot(piece.slope, m) + piece.intercept);
          return ExtReal(best);
        } else if constexpr (std::is_same_v<T, BarycentricQuad>) {
          const auto m = barycenter(sigma);
          const auto& cx = c.x_space()->coord(x);
          double s = 0.0;
          for (std::size_t k = 0; k < m.size(); ++k) s += (m[k] - cx[k]) * (m[k] - cx[k]);
          return ExtReal(0.5 * node.scale * s);
        } else if constexpr (std::is_same_v<T, Dilation>) {
          return polytope_contains(node.per_x[x], sigma.weights(), kDomainTol)
                     ? ExtReal(0.0)
                     : ExtReal::pos_inf();
        } else if constexpr (std::is_same_v<T, EntropicShift>) {
          double s = 0.0;
          for (std::size_t y = 0; y < sigma.size(); ++y) {
            if (sigma[y] == 0.0) continue;  // 0 log 0 = 0
            if (!node.base[x][y].finite()) return ExtReal::pos_inf();
            s += sigma[y] * node.base[x][y].value();
            s += node.eps * sigma[y] * std::log(sigma[y] / node.ref[y]);
          }
          return ExtReal(s);
        } else {
          static_assert(std::is_same_v<T, Sum>);
          ExtReal s{0.0};
          for (const auto& t : node.terms) {
            s = s + eval_cost(t, x, sigma);
            if (s.is_pos_inf()) return s;
          }
          return s;
        }
      },
      c.node());
}

// --- polytope machinery --------------------------------------------------------

bool polytope_contains(const Polytope& p, const std::vector<double>& sigma, double tol) {
  for (const auto& con : p.constraints) {
    if (con.coeffs.size() != sigma.size()) throw DimensionMismatch("constraint width");
    const double v = dot(con.coeffs, sigma);
    switch (con.rel) {
      case lp::Rel::LE:
        if (v > con.rhs + tol) return false;
        break;
      case lp::Rel::GE:
        if (v < con.rhs - tol) return false;
        break;
      case lp::Rel::EQ:
        if (std::abs(v - con.rhs) > tol) return false;
        break;
    }
  }
  if (p.vertices) {
    // Best max-deviation convex-combination fit; member iff deviation <= tol.
    const auto& verts = *p.vertices;
    if (verts.empty()) return false;
    const std::size_t m = sigma.size(), k = verts.size();
    lp::LinearProgram prog;
    prog.sense = lp::Sense::Min;
    for (std::size_t i = 0; i < k; ++i) prog.add_var(0.0);
    const std::size_t t = prog.add_var(1.0);
    for (std::size_t y = 0; y < m; ++y) {
      std::vector<double> lo(k + 1, 0.0), hi(k + 1, 0.0);
      for (std::size_t i = 0; i < k; ++i) lo[i] = hi[i] = verts[i][y];
      lo[t] = 1.0;
      hi[t] = -1.0;
      prog.add_row(std::move(lo), lp::Rel::GE, sigma[y]);  // V.lam + t >= sigma_y
      prog.add_row(std::move(hi), lp::Rel::LE, sigma[y]);  // V.lam - t <= sigma_y
    }
    std::vector<double> ones(k + 1, 1.0);
    ones[t] = 0.0;
    prog.add_row(std::move(ones), lp::Rel::EQ, 1.0);
    const auto r = lp::solve(prog);
    if (!r.optimal()) return false;
    return r.objective <= tol;
  }
  return true;
}

MaximizeResult maximize_over_polytope(const Polytope& p, const SpacePtr& y,
                                      const std::vector<double>& obj) {
  const std::size_t m = y->size();
  if (obj.size() != m) throw DimensionMismatch("objective width");

  if (p.trivial()) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < m; ++j)
      if (obj[j] > obj[best]) best = j;
    return {ExtReal(obj[best]), Measure::dirac(y, best), false, 0.0};
  }
  if (p.vertices && p.constraints.empty()) {
    const auto& verts = *p.vertices;
    if (verts.empty()) return {ExtReal::neg_inf(), std::nullopt, true, 0.0};
    std::size_t best = 0;
    double bv = dot(obj, verts[0]);
    for (std::size_t i = 1; i < verts.size(); ++i) {
      const double v = dot(obj, verts[i]);
      if (v > bv) {
        bv = v;
        best = i;
      }
    }
    return {ExtReal(bv), make_measure(y, verts[best]), false, 0.0};
  }

  lp::LinearProgram prog;
  prog.sense = lp::Sense::Max;
  std::vector<std::size_t> sv(m);
  for (std::size_t j = 0; j < m; ++j) sv[j] = prog.add_var(obj[j]);
  std::vector<double> simplex_row(m, 1.0);
  prog.add_row(std::move(simplex_row), lp::Rel::EQ, 1.0);
  add_polytope_rows(p, prog, sv);
  const auto r = lp::solve(prog);
  if (r.status == lp::Status::Infeasible) return {ExtReal::neg_inf(), std::nullopt, true, 0.0};
  if (r.status != lp::Status::Optimal) throw NumericalFailure("polytope LP did not solve");
  std::vector<double> sigma(r.primal.begin(), r.primal.begin() + static_cast<long>(m));
  return {ExtReal(r.objective), make_measure(y, sigma), false, 0.0};
}

std::optional<std::vector<double>> interior_point(const Polytope& p, const SpacePtr& y) {
  const std::size_t m = y->size();
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Max;
  std::vector<std::size_t> sv(m);
  for (std::size_t j = 0; j < m; ++j) sv[j] = prog.add_var(0.0);
  const std::size_t t = prog.add_var(1.0, -1.0, 1.0);
  std::vector<double> simplex_row(m + 1, 1.0);
  simplex_row[t] = 0.0;
  prog.add_row(std::move(simplex_row), lp::Rel::EQ, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> row(m + 1, 0.0);
    row[j] = 1.0;
    row[t] = -1.0;
    prog.add_row(std::move(row), lp::Rel::GE, 0.0);  // sigma_j >= t
  }
  add_polytope_rows(p, prog, sv);
  const auto r = lp::solve(prog);
  if (!r.optimal()) return std::nullopt;
  std::vector<double> sigma(r.primal.begin(), r.primal.begin() + static_cast<long>(m));
  double s = 0.0;
  for (double& v : sigma) {
    v = std::max(v, 0.0);
    s += v;
  }
  for (auto& v : sigma) v /= s;
  return sigma;
}

void add_polytope_rows(const Polytope& p, lp::LinearProgram& prog,
                       const std::vector<std::size_t>& row_vars) {
  const std::size_t m = row_vars.size();
  // Homogeneous (perspective) form: a.R rel b * mass(R), mass = sum R.
  for (const auto& con : p.constraints) {
    if (con.coeffs.size() != m) throw DimensionMismatch("constraint width");
    std::vector<double> row(prog.num_vars(), 0.0);
    for (std::size_t j = 0; j < m; ++j) row[row_vars[j]] = con.coeffs[j] - con.rhs;
    prog.add_row(std::move(row), con.rel, 0.0);
  }
  if (p.vertices) {
    const auto& verts = *p.vertices;
    std::vector<std::size_t> lam(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i) lam[i] = prog.add_var(0.0);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> row(prog.num_vars(), 0.0);
      row[row_vars[j]] = 1.0;
      for (std::size_t i = 0; i < verts.size(); ++i) row[lam[i]] = -verts[i][j];
      prog.add_row(std::move(row), lp::Rel::EQ, 0.0);  // R = mass * conv(V)
    }
    std::vector<double> row(prog.num_vars(), 0.0);
    for (std::size_t i = 0; i < verts.size(); ++i) row[lam[i]] = 1.0;
    for (std::size_t j = 0; j < m; ++j) row[row_vars[j]] -= 1.0;
    prog.add_row(std::move(row), lp::Rel::EQ, 0.0);  // sum lam = mass
  }
}

namespace {

std::vector<std::vector<double>> dedup_vertices(std::vector<std::vector<double>> verts) {
  std::map<std::vector<long long>, std::vector<double>> seen;
  for (auto& v : verts) {
    std::vector<long long> key(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      key[i] = static_cast<long long>(std::llround(v[i] * 1e9));
    seen.emplace(std::move(key), std::move(v));
  }
  std::vector<std::vector<double>> out;
  out.reserve(seen.size());
  for (auto& [k, v] : seen) out.push_back(std::move(v));
  return out;
}

// 1-D barycenter family: the vertices of {sigma : barycenter = t} are the
// two-point measures straddling t (and delta_t when t is a grid point).
std::optional<std::vector<std::vector<double>>> straddle_vertices_1d(const Polytope& p,
                                                                     const SpacePtr& y) {
  if (p.vertices || p.constraints.size() != 1) return std::nullopt;
  if (!y->has_coords() || y->dim() != 1) return std::nullopt;
  const auto& con = p.constraints[0];
  if (con.rel != lp::Rel::EQ) return std::nullopt;
  const std::size_t m = y->size();
  for (std::size_t j = 0; j < m; ++j)
    if (con.coeffs[j] != y->coord(j)[0]) return std::nullopt;
  const double t = con.rhs;

  std::vector<std::vector<double>> verts;
  for (std::size_t a = 0; a < m; ++a) {
    const double ca = y->coord(a)[0];
    if (ca == t) {
      std::vector<double> v(m, 0.0);
      v[a] = 1.0;
      verts.push_back(std::move(v));
      continue;
    }
    for (std::size_t b = a + 1; b < m; ++b) {
      const double cb = y->coord(b)[0];
      const double lo = std::min(ca, cb), hi = std::max(ca, cb);
      if (t < lo || t > hi || lo == hi) continue;
      std::vector<double> v(m, 0.0);
      const double wa = (cb - t) / (cb - ca);
      v[a] += wa;
      v[b] += 1.0 - wa;
      verts.push_back(std::move(v));
    }
  }
  return dedup_vertices(std::move(verts));
}

}  // namespace

std::vector<std::vector<double>> enumerate_vertices(const Polytope& p, const SpacePtr& y,
                                                    std::size_t cap) {
  const std::size_t m = y->size();
  if (p.trivial()) {
    std::vector<std::vector<double>> verts(m, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < m; ++j) verts[j][j] = 1.0;
    return verts;
  }
  if (p.vertices && p.constraints.empty()) return dedup_vertices(*p.vertices);
  if (auto s = straddle_vertices_1d(p, y)) return *s;
  if (p.vertices) throw SizeCap("mixed hull+constraint vertex enumeration unsupported");
  if (m > cap) throw SizeCap("vertex enumeration capped at " + std::to_string(cap) + " points");

  // Standard form A z = b, z >= 0 over sigma and inequality slacks; every
  // vertex is a basic feasible solution.
  std::size_t n_ineq = 0;
  for (const auto& con : p.constraints)
    if (con.rel != lp::Rel::EQ) ++n_ineq;

  const std::size_t rows = 1 + p.constraints.size();
  const std::size_t cols = m + n_ineq;
  if (rows > cols) return {};
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols, 0.0));
  std::vector<double> b(rows, 0.0);
  for (std::size_t j = 0; j < m; ++j) a[0][j] = 1.0;
  b[0] = 1.0;
  std::size_t slack = m;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& con = p.constraints[i];
    for (std::size_t j = 0; j < m; ++j) a[i + 1][j] = con.coeffs[j];
    b[i + 1] = con.rhs;
    if (con.rel == lp::Rel::LE) a[i + 1][slack++] = 1.0;
    if (con.rel == lp::Rel::GE) a[i + 1][slack++] = -1.0;
  }

  std::vector<std::vector<double>> verts;
  std::vector<std::size_t> pick(rows);
  std::size_t combos = 0;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t k) {
    if (++combos > 2000000) throw SizeCap("vertex enumeration combinatorics exceeded");
    if (k == rows) {
      std::vector<std::vector<double>> mtx(rows, std::vector<double>(rows + 1, 0.0));
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c2 = 0; c2 < rows; ++c2) mtx[r][c2] = a[r][pick[c2]];
        mtx[r][rows] = b[r];
      }
      for (std::size_t c2 = 0; c2 < rows; ++c2) {
        std::size_t piv = c2;
        for (std::size_t r = c2 + 1; r < rows; ++r)
          if (std::abs(mtx[r][c2]) > std::abs(mtx[piv][c2])) piv = r;
        if (std::abs(mtx[piv][c2]) < 1e-11) return;
        std::swap(mtx[c2], mtx[piv]);
        for (std::size_t r = 0; r < rows; ++r) {
          if (r == c2) continue;
          const double f = mtx[r][c2] / mtx[c2][c2];
          if (f == 0.0) continue;
          for (std::size_t cc = c2; cc <= rows; ++cc) mtx[r][cc] -= f * mtx[c2][cc];
        }
      }
      std::vector<double> z(cols, 0.0);
      for (std::size_t c2 = 0; c2 < rows; ++c2) {
        const double v = mtx[c2][rows] / mtx[c2][c2];
        if (v < -1e-10) return;
        z[pick[c2]] = std::max(v, 0.0);
      }
      verts.emplace_back(z.begin(), z.begin() + static_cast<long>(m));
      return;
    }
    for (std::size_t c2 = start; c2 + (rows - k) <= cols; ++c2) {
      pick[k] = c2;
      rec(c2 + 1, k + 1);
    }
  };
  rec(0, 0);
  return dedup_vertices(std::move(verts));
}

// --- domains -------------------------------------------------------------------

namespace {

void forbid_infinite(const std::vector<std::vector<ExtReal>>& matrix, std::size_t x,
                     Polytope& out) {
  const std::size_t m = matrix[x].size();
  for (std::size_t y = 0; y < m; ++y) {
    if (matrix[x][y].finite()) continue;
    LinearConstraint con;
    con.coeffs.assign(m, 0.0);
    con.coeffs[y] = 1.0;
    con.rel = lp::Rel::EQ;
    con.rhs = 0.0;
    out.constraints.push_back(std::move(con));
  }
}

void merge_into(const Polytope& from, Polytope& into) {
  for (const auto& c : from.constraints) into.constraints.push_back(c);
  if (from.vertices) {
    if (into.vertices) throw SizeCap("intersection of two vertex-represented dilations");
    into.vertices = from.vertices;
  }
}

}  // namespace

Polytope domain_polytope(const WeakCost& c, std::size_t x) {
  Polytope out;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Linear>) {
          forbid_infinite(node.matrix, x, out);
        } else if constexpr (std::is_same_v<T, EntropicShift>) {
          forbid_infinite(node.base, x, out);
        } else if constexpr (std::is_same_v<T, Dilation>) {
          merge_into(node.per_x[x], out);
        } else if constexpr (std::is_same_v<T, Sum>) {
          for (const auto& t : node.terms) merge_into(domain_polytope(t, x), out);
        }
        // BarycentricPL / BarycentricQuad: the whole simplex.
      },
      c.node());
  return out;
}

MaximizeResult support_value(const WeakCost& c, std::size_t x, const Fn& g) {
  require_same_space(g.space(), c.y_space(), "support_value: g on wrong space");
  if (!g.finite()) throw Malformed("support_value needs a finite function");
  return maximize_over_polytope(domain_polytope(c, x), c.y_space(), g.finite_values());
}

// --- LP assembly -----------------------------------------------------------------

namespace {

void add_pl_epigraph(const std::vector<AffinePiece>& pieces, const Space& y,
                     lp::LinearProgram& prog, const std::vector<std::size_t>& row_vars) {
  const std::size_t t = prog.add_var(1.0, -lp::kInf, lp::kInf);
  for (const auto& piece : pieces) {
    const auto w = piece_row(piece, y);
    std::vector<double> row(prog.num_vars(), 0.0);
    for (std::size_t j = 0; j < row_vars.size(); ++j) row[row_vars[j]] = w[j];
    row[t] = -1.0;
    prog.add_row(std::move(row), lp::Rel::LE, 0.0);
  }
}

}  // namespace

void add_row_cost_to_lp(const WeakCost& c, std::size_t x, lp::LinearProgram& prog,
                        const std::vector<std::size_t>& row_vars) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Linear>) {
          for (std::size_t j = 0; j < row_vars.size(); ++j) {
            if (node.matrix[x][j].finite())
              prog.objective[row_vars[j]] += node.matrix[x][j].value();
            else
              prog.upper[row_vars[j]] = 0.0;  // +inf cost removed symbolically
          }
        } else if constexpr (std::is_same_v<T, BarycentricPL>) {
          add_pl_epigraph(node.pieces[x], *c.y_space(), prog, row_vars);
        } else if constexpr (std::is_same_v<T, Dilation>) {
          add_polytope_rows(node.per_x[x], prog, row_vars);
        } else if constexpr (std::is_same_v<T, Sum>) {
          for (const auto& t : node.terms) add_row_cost_to_lp(t, x, prog, row_vars);
        } else {
          throw Malformed("cost family is not LP-representable");
        }
      },
      c.node());
}

void add_row_domain_to_lp(const WeakCost& c, std::size_t x, lp::LinearProgram& prog,
                          const std::vector<std::size_t>& row_vars) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Linear>) {
          for (std::size_t j = 0; j < row_vars.size(); ++j)
            if (!node.matrix[x][j].finite()) prog.upper[row_vars[j]] = 0.0;
        } else if constexpr (std::is_same_v<T, EntropicShift>) {
          for (std::size_t j = 0; j < row_vars.size(); ++j)
            if (!node.base[x][j].finite()) prog.upper[row_vars[j]] = 0.0;
        } else if constexpr (std::is_same_v<T, Dilation>) {
          add_polytope_rows(node.per_x[x], prog, row_vars);
        } else if constexpr (std::is_same_v<T, Sum>) {
          for (const auto& t : node.terms) add_row_domain_to_lp(t, x, prog, row_vars);
        }
      },
      c.node());
}

// --- maximization ----------------------------------------------------------------

namespace {

MaximizeResult maximize_lp_representable(const WeakCost& c, std::size_t x,
                                         const std::vector<double>& g) {
  const std::size_t m = c.y_space()->size();
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Min;  // minimize cost(sigma) - g.sigma
  std::vector<std::size_t> sv(m);
  for (std::size_t j = 0; j < m; ++j) sv[j] = prog.add_var(0.0);
  std::vector<double> simplex_row(m, 1.0);
  prog.add_row(std::move(simplex_row), lp::Rel::EQ, 1.0);
  add_row_cost_to_lp(c, x, prog, sv);
  for (std::size_t j = 0; j < m; ++j) prog.objective[sv[j]] -= g[j];
  const auto r = lp::solve(prog);
  if (r.status == lp::Status::Infeasible) return {ExtReal::neg_inf(), std::nullopt, true, 0.0};
  if (r.status != lp::Status::Optimal) throw NumericalFailure("conjugate LP failed");
  std::vector<double> sigma(r.primal.begin(), r.primal.begin() + static_cast<long>(m));
  return {ExtReal(-r.objective), make_measure(c.y_space(), sigma), false, 0.0};
}

MaximizeResult maximize_entropic(const EntropicShift& e, const SpacePtr& y, std::size_t x,
                                 const std::vector<double>& g) {
  const std::size_t m = y->size();
  // Gibbs maximizer sigma*(y) ~ ref(y) exp((g - c)/eps); the value is the
  // stabilized log-sum-exp.
  double shift = -lp::kInf;
  std::vector<double> expo(m, -lp::kInf);
  for (std::size_t j = 0; j < m; ++j) {
    if (!e.base[x][j].finite()) continue;
    expo[j] = (g[j] - e.base[x][j].value()) / e.eps + std::log(e.ref[j]);
    shift = std::max(shift, expo[j]);
  }
  if (shift == -lp::kInf) return {ExtReal::neg_inf(), std::nullopt, true, 0.0};
  double z = 0.0;
  std::vector<double> sigma(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (expo[j] == -lp::kInf) continue;
    sigma[j] = std::exp(expo[j] - shift);
    z += sigma[j];
  }
  for (auto& v : sigma) v /= z;
  return {ExtReal(e.eps * (shift + std::log(z))), make_measure(y, sigma), false, 0.0};
}

constexpr double kLogFloor = 1e-300;

struct FwObjective {
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> grad;
  bool quadratic_line_search = true;
};

double dot2(const std::vector<double>& a, const std::vector<double>& b) { return dot(a, b); }

// Value/grad of g.sigma - c(x, sigma) over the domain polytope. Logs are
// clamped away from zero so boundary gradients stay finite and keep pulling
// mass inward.
void accumulate_fw_terms(
    const WeakCost& c, std::size_t x,
    std::vector<std::function<double(const std::vector<double>&)>>& vals,
    std::vector<std::function<void(const std::vector<double>&, std::vector<double>&)>>& grads,
    bool& pure_quadratic) {
  const SpacePtr y = c.y_space();
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Linear>) {
          std::vector<double> coef(y->size(), 0.0);
          for (std::size_t j = 0; j < y->size(); ++j)
            coef[j] = node.matrix[x][j].finite() ? node.matrix[x][j].value() : 0.0;
          vals.push_back([coef](const std::vector<double>& s) { return -dot2(coef, s); });
          grads.push_back([coef](const std::vector<double>&, std::vector<double>& out) {
            for (std::size_t j = 0; j < out.size(); ++j) out[j] -= coef[j];
          });
        } else if constexpr (std::is_same_v<T, BarycentricPL>) {
          pure_quadratic = false;
          std::vector<std::vector<double>> rows;
          rows.reserve(node.pieces[x].size());
          for (const auto& piece : node.pieces[x]) rows.push_back(piece_row(piece, *y));
          vals.push_back([rows](const std::vector<double>& s) {
            double best = -lp::kInf;
            for (const auto& r : rows) best = std::max(best, dot2(r, s));
            return -best;
          });
          grads.push_back([rows](const std::vector<double>& s, std::vector<double>& out) {
            std::size_t arg = 0;
            double best = -lp::kInf;
            for (std::size_t k = 0; k < rows.size(); ++k) {
              const double v = dot2(rows[k], s);
              if (v > best) {
                best = v;
                arg = k;
              }
            }
            for (std::size_t j = 0; j < out.size(); ++j) out[j] -= rows[arg][j];
          });
        } else if constexpr (std::is_same_v<T, BarycentricQuad>) {
          const auto cx = c.x_space()->coord(x);
          const double s0 = node.scale;
          const SpacePtr ysp = y;
          auto bc = [ysp, cx](const std::vector<double>& s) {
            std::vector<double> m(cx.size(), 0.0);
            for (std::size_t j = 0; j < s.size(); ++j)
              for (std::size_t k = 0; k < cx.size(); ++k) m[k] += s[j] * ysp->coord(j)[k];
            return m;
          };
          vals.push_back([bc, cx, s0](const std::vector<double>& s) {
            const auto m = bc(s);
            double q = 0.0;
            for (std::size_t k = 0; k < cx.size(); ++k) q += (m[k] - cx[k]) * (m[k] - cx[k]);
            return -0.5 * s0 * q;
          });
          grads.push_back([bc, cx, s0, ysp](const std::vector<double>& s, std::vector<double>& out) {
            const auto m = bc(s);
            for (std::size_t j = 0; j < out.size(); ++j) {
              double dj = 0.0;
              for (std::size_t k = 0; k < cx.size(); ++k)
                dj += (m[k] - cx[k]) * ysp->coord(j)[k];
              out[j] -= s0 * dj;
            }
          });
        } else if constexpr (std::is_same_v<T, EntropicShift>) {
          pure_quadratic = false;
          std::vector<double> coef(y->size(), 0.0);
          for (std::size_t j = 0; j < y->size(); ++j)
            coef[j] = node.base[x][j].finite() ? node.base[x][j].value() : 0.0;
          const double eps = node.eps;
          const auto ref = node.ref;
          vals.push_back([coef, eps, ref](const std::vector<double>& s) {
            double v = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) {
              if (s[j] <= 0.0) continue;
              v -= s[j] * coef[j] + eps * s[j] * std::log(s[j] / ref[j]);
            }
            return v;
          });
          grads.push_back([coef, eps, ref](const std::vector<double>& s, std::vector<double>& out) {
            for (std::size_t j = 0; j < out.size(); ++j) {
              const double sj = std::max(s[j], kLogFloor);
              out[j] -= coef[j] + eps * (std::log(sj / ref[j]) + 1.0);
            }
          });
        } else if constexpr (std::is_same_v<T, Sum>) {
          for (const auto& t : node.terms) accumulate_fw_terms(t, x, vals, grads, pure_quadratic);
        }
        // Dilation: handled through the domain polytope.
      },
      c.node());
}

FwObjective build_fw_objective(const WeakCost& c, std::size_t x, std::vector<double> g) {
  std::vector<std::function<double(const std::vector<double>&)>> vals;
  std::vector<std::function<void(const std::vector<double>&, std::vector<double>&)>> grads;
  bool pure_quadratic = true;
  accumulate_fw_terms(c, x, vals, grads, pure_quadratic);

  FwObjective obj;
  obj.value = [vals, g](const std::vector<double>& s) {
    double v = dot2(g, s);
    for (const auto& f : vals) v += f(s);
    return v;
  };
  obj.grad = [grads, g](const std::vector<double>& s) {
    std::vector<double> out(g);
    for (const auto& f : grads) f(s, out);
    return out;
  };
  obj.quadratic_line_search = pure_quadratic;
  return obj;
}

// Away-step Frank-Wolfe over dom ∩ P(Y). The FW gap upper-bounds the
// suboptimality, so the returned certificate is a true error bound.
MaximizeResult fw_maximize(const WeakCost& c, std::size_t x, const std::vector<double>& g,
                           double tol, std::size_t cap) {
  const SpacePtr y = c.y_space();
  const std::size_t m = y->size();
  const Polytope dom = domain_polytope(c, x);
  FwObjective obj = build_fw_objective(c, x, g);

  auto lmo = [&](const std::vector<double>& dir) -> std::optional<std::vector<double>> {
    auto r = maximize_over_polytope(dom, y, dir);
    if (r.infeasible) return std::nullopt;
    return r.argmax->weights();
  };
  auto start = lmo(g);
  if (!start) return {ExtReal::neg_inf(), std::nullopt, true, 0.0};

  std::vector<std::vector<double>> active{*start};
  std::vector<double> weights{1.0};
  std::vector<double> sigma = *start;
  double gap = lp::kInf;

  auto line_search = [&](const std::vector<double>& dir, double tmax) -> double {
    if (tmax <= 0.0) return 0.0;
    if (obj.quadratic_line_search) {
      // Two evaluations and a slope pin the parabola exactly.
      const double f0 = obj.value(sigma);
      std::vector<double> probe(m);
      for (std::size_t j = 0; j < m; ++j) probe[j] = sigma[j] + tmax * dir[j];
      const double f1 = obj.value(probe);
      const auto gr = obj.grad(sigma);
      const double slope = dot2(gr, dir);
      const double curv = 2.0 * (f1 - f0 - slope * tmax) / (tmax * tmax);
      if (curv >= -1e-15) return slope > 0.0 ? tmax : 0.0;
      return std::clamp(-slope / curv, 0.0, tmax);
    }
    double lo = 0.0, hi = tmax;
    for (int it = 0; it < 120; ++it) {
      const double t1 = lo + (hi - lo) / 3.0, t2 = hi - (hi - lo) / 3.0;
      std::vector<double> p1(m), p2(m);
      for (std::size_t j = 0; j < m; ++j) {
        p1[j] = sigma[j] + t1 * dir[j];
        p2[j] = sigma[j] + t2 * dir[j];
      }
      if (obj.value(p1) < obj.value(p2))
        lo = t1;
      else
        hi = t2;
    }
    return 0.5 * (lo + hi);
  };

  for (std::size_t it = 0; it < cap; ++it) {
    const auto gr = obj.grad(sigma);
    const auto s = lmo(gr);
    if (!s) throw NumericalFailure("FW oracle lost feasibility");
    std::vector<double> d_fw(m);
    for (std::size_t j = 0; j < m; ++j) d_fw[j] = (*s)[j] - sigma[j];
    gap = dot2(gr, d_fw);
    if (gap <= tol) break;

    std::size_t away = 0;
    double worst = lp::kInf;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double v = dot2(gr, active[k]);
      if (v < worst) {
        worst = v;
        away = k;
      }
    }
    std::vector<double> d_away(m);
    for (std::size_t j = 0; j < m; ++j) d_away[j] = sigma[j] - active[away][j];
    const double gap_away = dot2(gr, d_away);

    if (gap >= gap_away || active.size() == 1) {
      const double t = line_search(d_fw, 1.0);
      if (t <= 0.0) break;  // numerically stalled at the certificate gap
      for (std::size_t j = 0; j < m; ++j) sigma[j] += t * d_fw[j];
      for (auto& w : weights) w *= (1.0 - t);
      bool found = false;
      for (std::size_t k = 0; k < active.size(); ++k)
        if (active[k] == *s) {
          weights[k] += t;
          found = true;
          break;
        }
      if (!found) {
        active.push_back(*s);
        weights.push_back(t);
      }
    } else {
      const double wa = weights[away];
      const double tmax = wa >= 1.0 ? 1e6 : wa / (1.0 - wa);
      const double t = line_search(d_away, tmax);
      for (std::size_t j = 0; j < m; ++j) sigma[j] += t * d_away[j];
      for (auto& w : weights) w *= (1.0 + t);
      weights[away] -= t * (1.0 - (wa >= 1.0 ? 0.0 : 0.0));
      weights[away] = std::max(weights[away] - 0.0, 0.0);
    }

    for (std::size_t k = active.size(); k-- > 0;) {
      if (weights[k] > 1e-15) continue;
      active.erase(active.begin() + static_cast<long>(k));
      weights.erase(weights.begin() + static_cast<long>(k));
    }
    if ((it & 63u) == 63u && !active.empty()) {
      double tw = 0.0;
      for (double w : weights) tw += w;
      if (tw > 0.0) {
        for (auto& w : weights) w /= tw;
        std::fill(sigma.begin(), sigma.end(), 0.0);
        for (std::size_t k = 0; k < active.size(); ++k)
          for (std::size_t j = 0; j < m; ++j) sigma[j] += weights[k] * active[k][j];
      }
    }
  }

  for (auto& v : sigma) v = std::max(v, 0.0);
  double total = 0.0;
  for (double v : sigma) total += v;
  for (auto& v : sigma) v /= total;
  return {ExtReal(obj.value(sigma)), make_measure(y, sigma), false, std::max(gap, 0.0)};
}

}  // namespace

MaximizeResult maximize_linear_minus_cost(const WeakCost& c, std::size_t x, const Fn& g) {
  require_same_space(g.space(), c.y_space(), "maximize: g on wrong space");
  if (!g.finite()) throw Malformed("maximize needs a finite test function");
  if (x >= c.x_space()->size()) throw DimensionMismatch("x index out of range");
  const auto gv = g.finite_values();

  if (const auto* lin = std::get_if<Linear>(&c.node())) {
    double best = -lp::kInf;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < gv.size(); ++j) {
      if (!lin->matrix[x][j].finite()) continue;
      const double v = gv[j] - lin->matrix[x][j].value();
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    if (best == -lp::kInf) return {ExtReal::neg_inf(), std::nullopt, true, 0.0};
    return {ExtReal(best), Measure::dirac(c.y_space(), arg), false, 0.0};
  }
  if (const auto* dil = std::get_if<Dilation>(&c.node()))
    return maximize_over_polytope(dil->per_x[x], c.y_space(), gv);
  if (const auto* ent = std::get_if<EntropicShift>(&c.node()))
    return maximize_entropic(*ent, c.y_space(), x, gv);
  if (c.lp_representable()) return maximize_lp_representable(c, x, gv);

  auto r = fw_maximize(c, x, gv, 1e-8, 10000);
  if (!r.infeasible && r.certificate_gap > 1e-6 * (1.0 + std::abs(r.value.finite_or(0.0))))
    throw FwNoConverge("gap " + std::to_string(r.certificate_gap));
  return r;
}

MaximizeResult maximize_via_fw(const WeakCost& c, std::size_t x, const Fn& g, double tol,
                               std::size_t cap) {
  require_same_space(g.space(), c.y_space(), "maximize: g on wrong space");
  if (!g.finite()) throw Malformed("maximize needs a finite test function");
  return fw_maximize(c, x, g.finite_values(), tol, cap);
}

}  // namespace kantor::costs
