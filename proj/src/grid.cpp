#include "brsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brsim/errors.hpp"

namespace brsim {

void VariogramModel::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw Error(ErrorKind::DomainError, "variogram alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
  if (!(scale > 0.0)) {
    throw Error(ErrorKind::DomainError, "variogram scale must be positive, got " + std::to_string(scale));
  }
}

double VariogramModel::gamma(double h) const {
  if (h == 0.0) return 0.0;
  return scale * std::pow(std::fabs(h), alpha);
}

Grid::Grid(double half_width, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorKind::InvalidLattice, "grid step must be positive");
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error(ErrorKind::InvalidLattice, "grid half width must be positive");
  }
  const double ratio = half_width / step;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorKind::InvalidLattice, "half width b=" + std::to_string(half_width) +
                                               " is not a multiple of step p=" + std::to_string(step));
  }
  step_ = step;
  half_count_ = static_cast<std::int64_t>(rounded);
}

Grid Grid::from_half_count(double step, std::int64_t half_count) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidLattice, "grid step must be positive");
  if (half_count < 1) throw Error(ErrorKind::InvalidLattice, "grid needs at least one nonzero point");
  Grid g;
  g.step_ = step;
  g.half_count_ = half_count;
  return g;
}

std::optional<std::int64_t> Grid::index_of(double t) const {
  const double ratio = t / step_;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) > 1e-9) return std::nullopt;
  const auto index = static_cast<std::int64_t>(rounded);
  if (!contains_index(index)) return std::nullopt;
  return index;
}

std::vector<double> Grid::points() const {
  std::vector<double> out;
  out.reserve(size());
  for (std::int64_t i = -half_count_; i <= half_count_; ++i) out.push_back(point(i));
  return out;
}

std::int64_t steps_covering(double length, double step) {
  const double ratio = length / step;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio)) {
    return static_cast<std::int64_t>(rounded);
  }
  return static_cast<std::int64_t>(std::ceil(ratio));
}

}  // namespace brsim
