#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kantor/errors.hpp"
#include "kantor/extended.hpp"

namespace kantor {

// A finite ground set, optionally with a Euclidean embedding and/or a
// metric. Immutable after construction; shared by handle everywhere.
//
// The metric must be symmetric, nonnegative, with zero diagonal. The
// triangle inequality is deliberately not required.
class Space {
 public:
  Space(std::vector<std::string> labels,
        std::optional<std::vector<std::vector<double>>> coords = std::nullopt,
        std::optional<std::vector<std::vector<double>>> metric = std::nullopt);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }

  bool has_coords() const { return coords_.has_value(); }
  std::size_t dim() const;
  const std::vector<double>& coord(std::size_t i) const;
  const std::vector<std::vector<double>>& coords() const;

  bool has_metric() const { return metric_.has_value(); }
  double distance(std::size_t i, std::size_t j) const;

  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::optional<std::vector<std::vector<double>>> coords_;
  std::optional<std::vector<std::vector<double>>> metric_;
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_space(std::vector<std::string> labels,
                    std::optional<std::vector<std::vector<double>>> coords = std::nullopt,
                    std::optional<std::vector<std::vector<double>>> metric = std::nullopt);

// Regular grid {x0, x0+step, ...} on the real line, embedded in R^1.
SpacePtr make_grid_space(double x0, double step, std::size_t n);

// The disjoint union X ⊔ Y, labels tagged "L:" / "R:". Hosts cones of
// functions on both components at once (restricted balayage).
SpacePtr disjoint_union(const SpacePtr& x, const SpacePtr& y);

// Two spaces are interchangeable if same object or structurally equal.
bool same_space(const SpacePtr& a, const SpacePtr& b);
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where);

// A function on a finite space, valued in the extended reals. Generators
// and dual potentials must be finite everywhere (checked by callers via
// finite()).
class Fn {
 public:
  Fn(SpacePtr space, std::vector<ExtReal> values);
  Fn(SpacePtr space, const std::vector<double>& values);

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  ExtReal operator[](std::size_t i) const { return values_[i]; }
  const std::vector<ExtReal>& values() const { return values_; }

  bool finite() const;
  // Throws ArithmeticError if any value is infinite.
  std::vector<double> finite_values() const;

  static Fn constant(SpacePtr space, double c);

 private:
  SpacePtr space_;
  std::vector<ExtReal> values_;
};

}  // namespace kantor
