#include "kantor/space.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace kantor {

Space::Space(std::vector<std::string> labels,
             std::optional<std::vector<std::vector<double>>> coords,
             std::optional<std::vector<std::vector<double>>> metric)
    : labels_(std::move(labels)), coords_(std::move(coords)), metric_(std::move(metric)) {
  if (labels_.empty()) throw Malformed("space must have at least one point");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw Malformed("space labels must be distinct");

  if (coords_) {
    if (coords_->size() != labels_.size())
      throw DimensionMismatch("coords count != label count");
    const std::size_t d = coords_->front().size();
    if (d == 0) throw Malformed("coords must have dimension >= 1");
    for (const auto& c : *coords_)
      if (c.size() != d) throw DimensionMismatch("coords rows have mixed dimensions");
  }

  if (metric_) {
    const std::size_t n = labels_.size();
    if (metric_->size() != n) throw DimensionMismatch("metric rows != point count");
    for (std::size_t i = 0; i < n; ++i) {
      if ((*metric_)[i].size() != n) throw DimensionMismatch("metric is not square");
      if ((*metric_)[i][i] != 0.0) throw Malformed("metric diagonal must be zero");
      for (std::size_t j = 0; j < n; ++j) {
        if ((*metric_)[i][j] < 0.0) throw Malformed("metric must be nonnegative");
        if ((*metric_)[i][j] != (*metric_)[j][i]) throw Malformed("metric must be symmetric");
      }
    }
  }
}

std::size_t Space::dim() const {
  if (!coords_) throw NoEmbedding("space has no coordinates");
  return coords_->front().size();
}

const std::vector<double>& Space::coord(std::size_t i) const {
  if (!coords_) throw NoEmbedding("space has no coordinates");
  return (*coords_)[i];
}

const std::vector<std::vector<double>>& Space::coords() const {
  if (!coords_) throw NoEmbedding("space has no coordinates");
  return *coords_;
}

double Space::distance(std::size_t i, std::size_t j) const {
  if (metric_) return (*metric_)[i][j];
  if (coords_) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) {
      const double d = (*coords_)[i][k] - (*coords_)[j][k];
      s += d * d;
    }
    return std::sqrt(s);
  }
  throw NoEmbedding("space has neither metric nor coordinates");
}

std::size_t Space::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  throw Malformed("no point labelled '" + label + "'");
}

SpacePtr make_space(std::vector<std::string> labels,
                    std::optional<std::vector<std::vector<double>>> coords,
                    std::optional<std::vector<std::vector<double>>> metric) {
  return std::make_shared<const Space>(std::move(labels), std::move(coords), std::move(metric));
}

SpacePtr make_grid_space(double x0, double step, std::size_t n) {
  std::vector<std::string> labels(n);
  std::vector<std::vector<double>> coords(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x0 + step * static_cast<double>(i);
    std::ostringstream os;
    os << "g" << i;
    labels[i] = os.str();
    coords[i] = {x};
  }
  return make_space(std::move(labels), std::move(coords));
}

SpacePtr disjoint_union(const SpacePtr& x, const SpacePtr& y) {
  std::vector<std::string> labels;
  labels.reserve(x->size() + y->size());
  for (const auto& l : x->labels()) labels.push_back("L:" + l);
  for (const auto& l : y->labels()) labels.push_back("R:" + l);

  std::optional<std::vector<std::vector<double>>> coords;
  if (x->has_coords() && y->has_coords() && x->dim() == y->dim()) {
    coords.emplace();
    coords->reserve(labels.size());
    for (std::size_t i = 0; i < x->size(); ++i) coords->push_back(x->coord(i));
    for (std::size_t i = 0; i < y->size(); ++i) coords->push_back(y->coord(i));
  }
  return make_space(std::move(labels), std::move(coords));
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->labels() != b->labels()) return false;
  if (a->has_coords() != b->has_coords()) return false;
  if (a->has_coords() && a->coords() != b->coords()) return false;
  return true;
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where) {
  if (!same_space(a, b)) throw SpaceMismatch(where);
}

Fn::Fn(SpacePtr space, std::vector<ExtReal> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_->size())
    throw DimensionMismatch("function length != space size");
}

Fn::Fn(SpacePtr space, const std::vector<double>& values)
    : Fn(std::move(space), std::vector<ExtReal>(values.begin(), values.end())) {}

bool Fn::finite() const {
  for (const auto& v : values_)
    if (!v.finite()) return false;
  return true;
}

std::vector<double> Fn::finite_values() const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].value();
  return out;
}

Fn Fn::constant(SpacePtr space, double c) {
  const std::size_t n = space->size();
  return Fn(std::move(space), std::vector<ExtReal>(n, ExtReal(c)));
}

}  // namespace kantor
