#include "kantor/measure.hpp"

#include <cmath>
#include <numeric>

namespace kantor {

namespace {

double checked_sum(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

}  // namespace

Measure::Measure(SpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (weights_.size() != space_->size())
    throw DimensionMismatch("measure length != space size");
  for (double w : weights_)
    if (w < 0.0) throw NegativeMass("measure has a negative weight");
  const double s = checked_sum(weights_);
  if (std::abs(s - 1.0) > kInputMassTol)
    throw NotAProbability("weights sum to " + std::to_string(s));
  if (s != 1.0) {
    for (double& w : weights_) w /= s;
  }
}

double Measure::integrate(const std::vector<double>& values) const {
  if (values.size() != weights_.size())
    throw DimensionMismatch("integrand length != space size");
  double s = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * values[i];
  return s;
}

ExtReal Measure::integrate(const Fn& f) const {
  require_same_space(space_, f.space(), "integrate: function on wrong space");
  ExtReal s{0.0};
  for (std::size_t i = 0; i < weights_.size(); ++i) s = s + weights_[i] * f[i];
  return s;
}

Measure Measure::dirac(SpacePtr space, std::size_t at) {
  std::vector<double> w(space->size(), 0.0);
  w.at(at) = 1.0;
  return Measure(std::move(space), std::move(w));
}

Measure Measure::uniform(SpacePtr space) {
  const std::size_t n = space->size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return Measure(std::move(space), std::move(w));
}

Measure mix(double lambda, const Measure& a, const Measure& b) {
  require_same_space(a.space(), b.space(), "mix: measures on different spaces");
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = lambda * a[i] + (1.0 - lambda) * b[i];
  return Measure(a.space(), std::move(w));
}

Measure make_measure(SpacePtr space, std::vector<double> weights) {
  if (weights.size() != space->size())
    throw DimensionMismatch("make_measure: weights length != space size");
  for (double& w : weights) {
    if (w < -kInternalTol) throw NegativeMass("entry " + std::to_string(w));
    if (w < 0.0) w = 0.0;
  }
  const double s = checked_sum(weights);
  if (std::abs(s - 1.0) > kInputMassTol)
    throw NotAProbability("weights sum to " + std::to_string(s));
  return Measure(std::move(space), std::move(weights));
}

Coupling::Coupling(SpacePtr row_space, SpacePtr col_space,
                   std::vector<std::vector<double>> matrix)
    : row_space_(std::move(row_space)),
      col_space_(std::move(col_space)),
      matrix_(std::move(matrix)) {
  if (matrix_.size() != row_space_->size())
    throw DimensionMismatch("coupling rows != row space size");
  double mass = 0.0;
  for (auto& row : matrix_) {
    if (row.size() != col_space_->size())
      throw DimensionMismatch("coupling cols != col space size");
    for (double& v : row) {
      if (v < -kInternalTol) throw NegativeMass("coupling entry " + std::to_string(v));
      if (v < 0.0) v = 0.0;
      mass += v;
    }
  }
  if (std::abs(mass - 1.0) > kInputMassTol)
    throw NotAProbability("coupling mass is " + std::to_string(mass));
  if (mass != 1.0) {
    for (auto& row : matrix_)
      for (double& v : row) v /= mass;
  }
}

Kernel::Kernel(SpacePtr row_space, SpacePtr col_space, std::vector<Measure> rows)
    : row_space_(std::move(row_space)), col_space_(std::move(col_space)), rows_(std::move(rows)) {
  if (rows_.size() != row_space_->size())
    throw DimensionMismatch("kernel rows != row space size");
  for (const auto& r : rows_)
    require_same_space(r.space(), col_space_, "kernel row on wrong space");
}

Kernel Kernel::identity(SpacePtr space) {
  std::vector<Measure> rows;
  rows.reserve(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) rows.push_back(Measure::dirac(space, i));
  return Kernel(space, space, std::move(rows));
}

Kernel Kernel::constant(SpacePtr row_space, const Measure& nu) {
  std::vector<Measure> rows(row_space->size(), nu);
  return Kernel(std::move(row_space), nu.space(), std::move(rows));
}

std::pair<Measure, Measure> marginals(const Coupling& pi) {
  const auto& m = pi.matrix();
  std::vector<double> row(pi.row_space()->size(), 0.0);
  std::vector<double> col(pi.col_space()->size(), 0.0);
  for (std::size_t x = 0; x < row.size(); ++x)
    for (std::size_t y = 0; y < col.size(); ++y) {
      row[x] += m[x][y];
      col[y] += m[x][y];
    }
  return {make_measure(pi.row_space(), std::move(row)),
          make_measure(pi.col_space(), std::move(col))};
}

Disintegration disintegrate(const Coupling& pi) {
  const auto& m = pi.matrix();
  const std::size_t nx = pi.row_space()->size();
  const std::size_t ny = pi.col_space()->size();

  std::vector<double> mu(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) mu[x] += m[x][y];

  std::vector<Measure> rows;
  rows.reserve(nx);
  std::vector<std::size_t> zero_rows;
  for (std::size_t x = 0; x < nx; ++x) {
    if (mu[x] <= 0.0) {
      zero_rows.push_back(x);
      rows.push_back(Measure::uniform(pi.col_space()));
      continue;
    }
    std::vector<double> w(ny);
    for (std::size_t y = 0; y < ny; ++y) w[y] = m[x][y] / mu[x];
    rows.push_back(make_measure(pi.col_space(), std::move(w)));
  }
  return {make_measure(pi.row_space(), std::move(mu)),
          Kernel(pi.row_space(), pi.col_space(), std::move(rows)),
          std::move(zero_rows)};
}

Coupling kernel_to_coupling(const Measure& mu, const Kernel& k) {
  require_same_space(mu.space(), k.row_space(), "kernel_to_coupling: mu on wrong space");
  const std::size_t nx = mu.size();
  const std::size_t ny = k.col_space()->size();
  std::vector<std::vector<double>> m(nx, std::vector<double>(ny, 0.0));
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) m[x][y] = mu[x] * k.row(x)[y];
  return Coupling(mu.space(), k.col_space(), std::move(m));
}

std::vector<double> barycenter(const Measure& sigma) {
  const auto& space = *sigma.space();
  if (!space.has_coords()) throw NoEmbedding("barycenter needs coordinates");
  std::vector<double> b(space.dim(), 0.0);
  for (std::size_t y = 0; y < sigma.size(); ++y)
    for (std::size_t k = 0; k < b.size(); ++k) b[k] += sigma[y] * space.coord(y)[k];
  return b;
}

Measure pushforward(const Measure& mu, const Kernel& m) {
  require_same_space(mu.space(), m.row_space(), "pushforward: mu on wrong space");
  std::vector<double> nu(m.col_space()->size(), 0.0);
  for (std::size_t x = 0; x < mu.size(); ++x)
    for (std::size_t y = 0; y < nu.size(); ++y) nu[y] += mu[x] * m.row(x)[y];
  return make_measure(m.col_space(), std::move(nu));
}

}  // namespace kantor
