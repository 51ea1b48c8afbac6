#include "doctest.h"

#include <cmath>
#include <sstream>

#include "kantor/lp.hpp"
#include "oracles.hpp"

using namespace kantor;
using lp::LinearProgram;
using lp::Rel;
using lp::Sense;
using lp::Status;

namespace {

LinearProgram transport_lp(const std::vector<std::vector<double>>& cost,
                           const std::vector<double>& mu, const std::vector<double>& nu) {
  const std::size_t m = mu.size(), n = nu.size();
  LinearProgram p;
  p.sense = Sense::Min;
  p.objective.assign(m * n, 0.0);
  p.lower.assign(m * n, 0.0);
  p.upper.assign(m * n, lp::kInf);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) p.objective[i * n + j] = cost[i][j];
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(m * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) row[i * n + j] = 1.0;
    p.add_row(std::move(row), Rel::EQ, mu[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) row[i * n + j] = 1.0;
    p.add_row(std::move(row), Rel::EQ, nu[j]);
  }
  return p;
}

}  // namespace

TEST_CASE("min x subject to x >= 3") {
  LinearProgram p;
  p.add_var(1.0, 0.0, lp::kInf);
  p.add_row({1.0}, Rel::GE, 3.0);
  auto r = lp::solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(3.0));
  CHECK(r.primal[0] == doctest::Approx(3.0));
}

TEST_CASE("max x+y over the unit simplex") {
  LinearProgram p;
  p.sense = Sense::Max;
  p.add_var(1.0);
  p.add_var(1.0);
  p.add_row({1.0, 1.0}, Rel::EQ, 1.0);
  auto r = lp::solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(1.0));
}

TEST_CASE("forced transportation plan") {
  auto p = transport_lp({{0.0, 1.0}, {1.0, 0.0}}, {1.0, 0.0}, {0.0, 1.0});
  auto r = lp::solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(1.0));
  CHECK(r.primal[1] == doctest::Approx(1.0));  // the only feasible coupling
  // Strong duality on this instance.
  CHECK(std::abs(r.objective - r.dual_objective) <= 1e-8 * (1.0 + std::abs(r.objective)));
}

TEST_CASE("feasibility: contradictory and simplex systems") {
  {
    auto [ok, pt] = lp::feasible({{1.0}, {1.0}}, {Rel::GE, Rel::LE}, {1.0, 0.0}, {0.0},
                                 {lp::kInf});
    CHECK_FALSE(ok);
    CHECK_FALSE(pt.has_value());
  }
  {
    auto [ok, pt] = lp::feasible({{1.0, 1.0, 1.0}}, {Rel::EQ}, {1.0}, {0.0, 0.0, 0.0},
                                 {lp::kInf, lp::kInf, lp::kInf});
    REQUIRE(ok);
    double s = 0.0;
    for (double v : *pt) {
      CHECK(v >= -1e-12);
      s += v;
    }
    CHECK(s == doctest::Approx(1.0));
  }
  {
    // Martingale coupling system for mu = d_0, nu = (d_-1 + d_1)/2 on {-1,0,1}.
    // Variables: pi(0 -> y), y in {-1,0,1}; mean zero and mass one.
    auto [ok, pt] = lp::feasible({{1.0, 1.0, 1.0}, {-1.0, 0.0, 1.0}, {1.0, 0.0, 0.0},
                                  {0.0, 0.0, 1.0}},
                                 {Rel::EQ, Rel::EQ, Rel::EQ, Rel::EQ},
                                 {1.0, 0.0, 0.5, 0.5}, {0.0, 0.0, 0.0},
                                 {lp::kInf, lp::kInf, lp::kInf});
    CHECK(ok);
  }
}

TEST_CASE("unbounded detection") {
  LinearProgram p;
  p.sense = Sense::Max;
  p.add_var(1.0, 0.0, lp::kInf);
  p.add_row({-1.0}, Rel::LE, 0.0);  // x >= 0, maximize x
  auto r = lp::solve(p);
  CHECK(r.status == Status::Unbounded);
}

TEST_CASE("free variables and equality rows") {
  // min |via split| not needed: free variable with equality pin.
  LinearProgram p;
  p.add_var(1.0, -lp::kInf, lp::kInf);
  p.add_var(2.0, -lp::kInf, lp::kInf);
  p.add_row({1.0, 1.0}, Rel::EQ, 4.0);
  p.add_row({1.0, -1.0}, Rel::EQ, 2.0);
  auto r = lp::solve(p);
  REQUIRE(r.optimal());
  CHECK(r.primal[0] == doctest::Approx(3.0));
  CHECK(r.primal[1] == doctest::Approx(1.0));
}

TEST_CASE("all-zero rows are dropped or detected as contradictions") {
  LinearProgram p;
  p.add_var(1.0);
  p.add_row({0.0}, Rel::LE, 5.0);
  p.add_row({1.0}, Rel::GE, 1.0);
  auto r = lp::solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(1.0));

  LinearProgram q;
  q.add_var(1.0);
  q.add_row({0.0}, Rel::GE, 5.0);
  auto rq = lp::solve(q);
  CHECK(rq.status == Status::Infeasible);
}

TEST_CASE("agreement with vertex enumeration on random transportation LPs") {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t m = 2 + rng.next_index(3), n = 2 + rng.next_index(3);
    std::vector<std::vector<double>> cost(m, std::vector<double>(n));
    for (auto& row : cost)
      for (auto& c : row) c = std::round(rng.uniform(0.0, 16.0)) / 4.0;  // rational data
    auto mu = oracle::random_dyadic_simplex(rng, m);
    auto nu = oracle::random_dyadic_simplex(rng, n);

    auto brute = oracle::transport_by_vertex_enumeration(cost, mu, nu);
    REQUIRE(brute.feasible);
    auto r = lp::solve(transport_lp(cost, mu, nu));
    REQUIRE(r.optimal());
    CHECK(std::abs(r.objective - brute.value) <= 1e-9);
    CHECK(std::abs(r.objective - r.dual_objective) <= 1e-8 * (1.0 + std::abs(r.objective)));
  }
}

TEST_CASE("strong duality on random bounded LPs") {
  oracle::Rng rng(99);
  int optimal_seen = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng.next_index(5);
    const std::size_t m = 1 + rng.next_index(5);
    LinearProgram p;
    p.sense = rng.next_index(2) == 0 ? Sense::Min : Sense::Max;
    for (std::size_t j = 0; j < n; ++j) p.add_var(rng.uniform(-2.0, 2.0), 0.0, 2.0);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(n);
      for (auto& a : row) a = rng.uniform(-1.0, 1.0);
      const Rel rel = static_cast<Rel>(rng.next_index(3));
      p.add_row(std::move(row), rel, rng.uniform(-0.5, 1.5));
    }
    lp::LpResult r;
    try {
      r = lp::solve(p);
    } catch (const NumericalFailure&) {
      continue;
    }
    if (!r.optimal()) continue;
    ++optimal_seen;
    CHECK(std::abs(r.objective - r.dual_objective) <= 1e-8 * (1.0 + std::abs(r.objective)));
    // Primal feasibility residual.
    for (std::size_t i = 0; i < m; ++i) {
      double ax = 0.0;
      for (std::size_t j = 0; j < n; ++j) ax += p.rows[i][j] * r.primal[j];
      if (p.relations[i] == Rel::LE) CHECK(ax <= p.rhs[i] + 1e-9);
      if (p.relations[i] == Rel::GE) CHECK(ax >= p.rhs[i] - 1e-9);
      if (p.relations[i] == Rel::EQ) CHECK(std::abs(ax - p.rhs[i]) <= 1e-9);
    }
  }
  CHECK(optimal_seen > 30);
}

TEST_CASE("deterministic: identical input bytes give identical output bytes") {
  oracle::Rng rng(5);
  auto mu = oracle::random_simplex(rng, 4);
  auto nu = oracle::random_simplex(rng, 4);
  std::vector<std::vector<double>> cost(4, std::vector<double>(4));
  for (auto& row : cost)
    for (auto& c : row) c = rng.uniform(0.0, 3.0);
  auto p = transport_lp(cost, mu, nu);
  auto r1 = lp::solve(p);
  auto r2 = lp::solve(p);
  REQUIRE(r1.optimal());
  CHECK(r1.objective == r2.objective);
  CHECK(r1.iterations == r2.iterations);
  for (std::size_t i = 0; i < r1.primal.size(); ++i) CHECK(r1.primal[i] == r2.primal[i]);
  for (std::size_t i = 0; i < r1.dual.size(); ++i) CHECK(r1.dual[i] == r2.dual[i]);
}

TEST_CASE("malformed programs are rejected") {
  LinearProgram p;
  p.add_var(1.0, 2.0, 1.0);  // crossing bounds
  CHECK_THROWS_AS(lp::solve(p), Malformed);

  LinearProgram q;
  q.add_var(std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(lp::solve(q), Malformed);
}

TEST_CASE("debug dump writes a readable tableau") {
  LinearProgram p;
  p.add_var(1.0);
  p.add_row({1.0}, Rel::GE, 3.0);
  std::ostringstream os;
  lp::set_debug_dump(&os);
  (void)lp::solve(p);
  lp::set_debug_dump(nullptr);
  CHECK(os.str().find("min") != std::string::npos);
  CHECK(os.str().find(">=") != std::string::npos);
}
