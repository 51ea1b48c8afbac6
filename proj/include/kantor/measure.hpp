#pragma once

#include <vector>

#include "kantor/space.hpp"

namespace kantor {

// Tolerances shared by the whole library: user input may be off by 1e-9
// and is renormalized; internal identities are asserted at 1e-12.
inline constexpr double kInputMassTol = 1e-9;
inline constexpr double kInternalTol = 1e-12;

// A probability vector over a Space. Weights are >= 0 and sum to 1 after
// construction. Immutable.
class Measure {
 public:
  Measure(SpacePtr space, std::vector<double> weights);

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  double integrate(const std::vector<double>& values) const;
  ExtReal integrate(const Fn& f) const;

  static Measure dirac(SpacePtr space, std::size_t at);
  static Measure uniform(SpacePtr space);

  friend Measure mix(double lambda, const Measure& a, const Measure& b);

 private:
  SpacePtr space_;
  std::vector<double> weights_;
};

// make_measure: validated constructor. Clamps entries in [-1e-12, 0) to 0,
// renormalizes when |sum - 1| <= 1e-9, errors otherwise.
Measure make_measure(SpacePtr space, std::vector<double> weights);

// A joint probability matrix on row_space x col_space.
class Coupling {
 public:
  Coupling(SpacePtr row_space, SpacePtr col_space,
           std::vector<std::vector<double>> matrix);

  const SpacePtr& row_space() const { return row_space_; }
  const SpacePtr& col_space() const { return col_space_; }
  const std::vector<std::vector<double>>& matrix() const { return matrix_; }
  double at(std::size_t x, std::size_t y) const { return matrix_[x][y]; }

 private:
  SpacePtr row_space_;
  SpacePtr col_space_;
  std::vector<std::vector<double>> matrix_;
};

// One probability measure on col_space per point of row_space.
class Kernel {
 public:
  Kernel(SpacePtr row_space, SpacePtr col_space, std::vector<Measure> rows);

  const SpacePtr& row_space() const { return row_space_; }
  const SpacePtr& col_space() const { return col_space_; }
  const std::vector<Measure>& rows() const { return rows_; }
  const Measure& row(std::size_t x) const { return rows_[x]; }

  static Kernel identity(SpacePtr space);
  static Kernel constant(SpacePtr row_space, const Measure& nu);

 private:
  SpacePtr row_space_;
  SpacePtr col_space_;
  std::vector<Measure> rows_;
};

std::pair<Measure, Measure> marginals(const Coupling& pi);

struct Disintegration {
  Measure mu;
  Kernel kernel;
  // Rows where mu(x) = 0: the conditional is undefined there ("mu-a.e."
  // statements are vacuous), so the row defaults to uniform and is flagged.
  std::vector<std::size_t> zero_mass_rows;
};

Disintegration disintegrate(const Coupling& pi);

Coupling kernel_to_coupling(const Measure& mu, const Kernel& k);

std::vector<double> barycenter(const Measure& sigma);

Measure pushforward(const Measure& mu, const Kernel& m);

}  // namespace kantor
