#include "doctest.h"

#include <cmath>

#include "kantor/measure.hpp"
#include "kantor/parallel.hpp"
#include "oracles.hpp"

using namespace kantor;

namespace {
SpacePtr two_points() { return make_space({"a", "b"}); }
}

TEST_CASE("make_measure: uniform, dirac, rejections") {
  auto s = two_points();
  auto u = make_measure(s, {0.5, 0.5});
  CHECK(u[0] == doctest::Approx(0.5));

  auto d = make_measure(s, {1.0, 0.0});
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 0.0);

  CHECK_THROWS_AS(make_measure(s, {0.7, 0.2}), NotAProbability);
  CHECK_THROWS_AS(make_measure(s, {1.1, -0.1}), NegativeMass);
  CHECK_THROWS_AS(make_measure(s, {0.5, 0.5, 0.0}), DimensionMismatch);

  // Tiny negatives clamp, near-1 sums renormalize.
  auto m = make_measure(s, {1.0 + 5e-10, -5e-13});
  CHECK(m[1] == 0.0);
  CHECK(m[0] == doctest::Approx(1.0));
}

TEST_CASE("marginals of basic couplings") {
  auto s = two_points();
  Coupling diag(s, s, {{0.5, 0.0}, {0.0, 0.5}});
  auto [mu, nu] = marginals(diag);
  CHECK(mu[0] == doctest::Approx(0.5));
  CHECK(nu[1] == doctest::Approx(0.5));

  Coupling corner(s, s, {{1.0, 0.0}, {0.0, 0.0}});
  auto [m2, n2] = marginals(corner);
  CHECK(m2[0] == doctest::Approx(1.0));
  CHECK(n2[0] == doctest::Approx(1.0));

  // Product coupling has the factor marginals.
  auto mu3 = make_measure(s, {0.25, 0.75});
  auto nu3 = make_measure(s, {0.6, 0.4});
  auto prod = kernel_to_coupling(mu3, Kernel::constant(s, nu3));
  auto [m3, n3] = marginals(prod);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(m3[i] == doctest::Approx(mu3[i]).epsilon(1e-12));
    CHECK(n3[i] == doctest::Approx(nu3[i]).epsilon(1e-12));
  }
}

TEST_CASE("disintegrate: diagonal, product, uniform") {
  auto s = two_points();
  Coupling diag(s, s, {{0.5, 0.0}, {0.0, 0.5}});
  auto d = disintegrate(diag);
  CHECK(d.zero_mass_rows.empty());
  CHECK(d.kernel.row(0)[0] == doctest::Approx(1.0));
  CHECK(d.kernel.row(1)[1] == doctest::Approx(1.0));

  auto nu = make_measure(s, {0.3, 0.7});
  auto prod = kernel_to_coupling(make_measure(s, {0.5, 0.5}), Kernel::constant(s, nu));
  auto dp = disintegrate(prod);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      CHECK(dp.kernel.row(x)[y] == doctest::Approx(nu[y]).epsilon(1e-12));

  Coupling quarter(s, s, {{0.25, 0.25}, {0.25, 0.25}});
  auto dq = disintegrate(quarter);
  CHECK(dq.mu[0] == doctest::Approx(0.5));
  CHECK(dq.kernel.row(0)[1] == doctest::Approx(0.5));

  // Zero-mass rows default to uniform and are flagged.
  Coupling top(s, s, {{0.5, 0.5}, {0.0, 0.0}});
  auto dz = disintegrate(top);
  REQUIRE(dz.zero_mass_rows.size() == 1);
  CHECK(dz.zero_mass_rows[0] == 1);
  CHECK(dz.kernel.row(1)[0] == doctest::Approx(0.5));
}

TEST_CASE("kernel_to_coupling basics") {
  auto s = two_points();
  auto nu = make_measure(s, {0.3, 0.7});
  Kernel k(s, s, {nu, make_measure(s, {0.9, 0.1})});

  auto c = kernel_to_coupling(Measure::dirac(s, 0), k);
  CHECK(c.at(0, 0) == doctest::Approx(0.3));
  CHECK(c.at(1, 0) == 0.0);
  CHECK(c.at(1, 1) == 0.0);

  auto prod = kernel_to_coupling(make_measure(s, {0.5, 0.5}), Kernel::constant(s, nu));
  CHECK(prod.at(0, 1) == doctest::Approx(0.35));
}

TEST_CASE("round trip disintegrate . kernel_to_coupling on random couplings") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nx = 2 + rng.next_index(4), ny = 2 + rng.next_index(4);
    std::vector<std::string> xl(nx), yl(ny);
    for (std::size_t i = 0; i < nx; ++i) xl[i] = "x" + std::to_string(i);
    for (std::size_t j = 0; j < ny; ++j) yl[j] = "y" + std::to_string(j);
    auto X = make_space(xl), Y = make_space(yl);

    // Strictly positive mu so every row is determined.
    std::vector<double> muw = oracle::random_simplex(rng, nx);
    for (auto& w : muw) w = 0.2 / nx + 0.8 * w;
    double s = 0.0;
    for (double w : muw) s += w;
    for (auto& w : muw) w /= s;
    auto mu = make_measure(X, muw);

    std::vector<Measure> rows;
    for (std::size_t i = 0; i < nx; ++i)
      rows.push_back(make_measure(Y, oracle::random_simplex(rng, ny)));
    Kernel k(X, Y, rows);

    auto pi = kernel_to_coupling(mu, k);
    auto d = disintegrate(pi);
    CHECK(d.zero_mass_rows.empty());
    for (std::size_t i = 0; i < nx; ++i) {
      CHECK(std::abs(d.mu[i] - mu[i]) <= 1e-12);
      for (std::size_t j = 0; j < ny; ++j)
        CHECK(std::abs(d.kernel.row(i)[j] - k.row(i)[j]) <= 1e-12);
    }

    // marginals(kernel_to_coupling(mu,k)) = (mu, pushforward(mu,k)).
    auto [mm, nn] = marginals(pi);
    auto push = pushforward(mu, k);
    for (std::size_t i = 0; i < nx; ++i) CHECK(std::abs(mm[i] - mu[i]) <= 1e-12);
    for (std::size_t j = 0; j < ny; ++j) CHECK(std::abs(nn[j] - push[j]) <= 1e-12);
  }
}

TEST_CASE("barycenter: diracs, symmetry, affinity") {
  auto line = make_space({"m", "z", "p"}, {{{-1.0}, {0.0}, {1.0}}});
  CHECK(barycenter(Measure::dirac(line, 0))[0] == -1.0);

  auto sym = make_measure(line, {0.5, 0.0, 0.5});
  CHECK(barycenter(sym)[0] == doctest::Approx(0.0));

  auto square = make_space({"00", "10", "01", "11"},
                           {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}});
  auto b = barycenter(Measure::uniform(square));
  CHECK(b[0] == doctest::Approx(0.5));
  CHECK(b[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(barycenter(Measure::uniform(make_space({"a"}))), NoEmbedding);

  oracle::Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    auto s1 = make_measure(line, oracle::random_simplex(rng, 3));
    auto s2 = make_measure(line, oracle::random_simplex(rng, 3));
    const double lam = rng.next_double();
    auto mixed = mix(lam, s1, s2);
    const double lhs = barycenter(mixed)[0];
    const double rhs = lam * barycenter(s1)[0] + (1.0 - lam) * barycenter(s2)[0];
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("pushforward: identity, constant, dirac rows") {
  auto s = two_points();
  auto mu = make_measure(s, {0.3, 0.7});
  auto id = Kernel::identity(s);
  auto p = pushforward(mu, id);
  CHECK(p[0] == doctest::Approx(0.3));

  auto nu0 = make_measure(s, {0.9, 0.1});
  auto c = pushforward(mu, Kernel::constant(s, nu0));
  CHECK(c[0] == doctest::Approx(0.9));

  Kernel k(s, s, {nu0, make_measure(s, {0.2, 0.8})});
  auto d = pushforward(Measure::dirac(s, 1), k);
  CHECK(d[1] == doctest::Approx(0.8));
}

TEST_CASE("disjoint union tags left/right") {
  auto X = make_space({"a"}, {{{0.0}}});
  auto Y = make_space({"b", "c"}, {{{1.0}, {2.0}}});
  auto XY = disjoint_union(X, Y);
  CHECK(XY->size() == 3);
  CHECK(XY->label(0) == "L:a");
  CHECK(XY->label(2) == "R:c");
  CHECK(XY->coord(1)[0] == 1.0);
}

TEST_CASE("parallel loop matches serial reference bit for bit") {
  std::vector<double> a(257), b(257);
  auto body = [&](std::vector<double>& out) {
    return [&out](std::size_t i) {
      double v = std::sin(static_cast<double>(i) * 0.1) + 1.5;
      out[i] = std::sqrt(v) * std::log1p(v);
    };
  };
  par::for_each_index_serial(a.size(), body(a));
  par::set_max_threads(4);
  par::for_each_index(b.size(), body(b));
  par::set_max_threads(-1);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
