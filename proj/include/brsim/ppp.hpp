#pragma once

#include <cstdint>
#include <vector>

#include "brsim/random_stream.hpp"

namespace brsim {

/// Decreasing points X_1 > X_2 > ... of a Poisson process with intensity
/// lambda * e^{-x} dx on the real line, X_k = log(1/S_k) with S_k a sum of k
/// iid exponential(lambda) waiting times. Lazy and unbounded.
class GumbelPointStream {
 public:
  /// Throws DomainError unless lambda > 0.
  explicit GumbelPointStream(double lambda);

  /// Draws the next waiting time from `rng` (one uniform).
  double next(RandomStream& rng) { return advance(rng.exponential(lambda_)); }
  /// Advances by a given waiting time; used for forced draws.
  double advance(double waiting_time);

  double lambda() const noexcept { return lambda_; }
  double sum() const noexcept { return sum_; }
  std::uint64_t count() const noexcept { return count_; }
  /// Last emitted point; +inf before the first one.
  double last() const noexcept;

 private:
  double lambda_;
  double sum_ = 0.0;
  std::uint64_t count_ = 0;
};

/// Where marks live: a closed interval, or a finite set of lattice sites.
class MarkSpace {
 public:
  /// Throws EmptyMarkSpace unless lo < hi.
  static MarkSpace interval(double lo, double hi);
  /// Throws EmptyMarkSpace when `sites` is empty.
  static MarkSpace lattice(std::vector<double> sites);
  /// Sites (p Z) cap [-v, v]. Throws EmptyMarkSpace when p <= 0 or v < 0.
  static MarkSpace symmetric_lattice(double step, double half_width);

  bool is_interval() const noexcept { return sites_.empty(); }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<double>& sites() const noexcept { return sites_; }
  bool contains(double h) const;

  /// One uniform per mark.
  double draw(RandomStream& rng) const;

 private:
  MarkSpace() = default;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> sites_;
};

struct MarkedPoint {
  double value;
  double mark;
};

/// One exponential draw for X, then one uniform for the mark.
MarkedPoint next_marked_point(GumbelPointStream& stream, const MarkSpace& marks, RandomStream& rng);

}  // namespace brsim
