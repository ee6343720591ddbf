#include "brsim/ppp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "brsim/errors.hpp"

namespace brsim {

GumbelPointStream::GumbelPointStream(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::DomainError, "point intensity must be positive, got " + std::to_string(lambda));
  }
}

double GumbelPointStream::advance(double waiting_time) {
  sum_ += waiting_time;
  ++count_;
  return -std::log(sum_);
}

double GumbelPointStream::last() const noexcept {
  if (count_ == 0) return std::numeric_limits<double>::infinity();
  return -std::log(sum_);
}

MarkSpace MarkSpace::interval(double lo, double hi) {
  if (!(lo < hi)) {
    throw Error(ErrorKind::EmptyMarkSpace,
                "mark interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "] has no length");
  }
  MarkSpace m;
  m.lo_ = lo;
  m.hi_ = hi;
  return m;
}

MarkSpace MarkSpace::lattice(std::vector<double> sites) {
  if (sites.empty()) throw Error(ErrorKind::EmptyMarkSpace, "no lattice sites");
  MarkSpace m;
  m.lo_ = *std::min_element(sites.begin(), sites.end());
  m.hi_ = *std::max_element(sites.begin(), sites.end());
  m.sites_ = std::move(sites);
  return m;
}

MarkSpace MarkSpace::symmetric_lattice(double step, double half_width) {
  if (!(step > 0.0) || !(half_width >= 0.0)) {
    throw Error(ErrorKind::EmptyMarkSpace, "lattice marks need step > 0 and half width >= 0");
  }
  const auto n = static_cast<std::int64_t>(std::floor(half_width / step + 1e-9));
  std::vector<double> sites;
  sites.reserve(static_cast<std::size_t>(2 * n + 1));
  for (std::int64_t i = -n; i <= n; ++i) sites.push_back(static_cast<double>(i) * step);
  return lattice(std::move(sites));
}

bool MarkSpace::contains(double h) const {
  if (is_interval()) return h >= lo_ && h <= hi_;
  return std::find(sites_.begin(), sites_.end(), h) != sites_.end();
}

double MarkSpace::draw(RandomStream& rng) const {
  if (is_interval()) return lo_ + (hi_ - lo_) * rng.uniform();
  return sites_[rng.index(sites_.size())];
}

MarkedPoint next_marked_point(GumbelPointStream& stream, const MarkSpace& marks, RandomStream& rng) {
  const double x = stream.next(rng);
  return {x, marks.draw(rng)};
}

}  // namespace brsim
