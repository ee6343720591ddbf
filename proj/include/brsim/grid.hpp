#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace brsim {

/// Fractional variogram gamma(h) = scale * |h|^alpha of the pinned Gaussian field.
struct VariogramModel {
  double alpha = 1.0;
  double scale = 0.5;

  /// Throws DomainError unless 0 < alpha <= 2 and scale > 0.
  void validate() const;

  double gamma(double h) const;
  /// Variance of W(t) under the pinning W(0) = 0, i.e. 2 * gamma(t).
  double sigma2(double t) const { return 2.0 * gamma(t); }
};

/// Symmetric lattice (p*Z) cap [-b, b]. Points are addressed by their signed
/// lattice index i in [-n, n], n = b / p; point(i) = i * p.
class Grid {
 public:
  /// Throws InvalidLattice unless p > 0, b > 0 and b is an integer multiple of p.
  Grid(double half_width, double step);

  static Grid from_half_count(double step, std::int64_t half_count);

  double step() const noexcept { return step_; }
  double half_width() const noexcept { return static_cast<double>(half_count_) * step_; }
  std::int64_t half_count() const noexcept { return half_count_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(2 * half_count_ + 1); }

  double point(std::int64_t index) const noexcept { return static_cast<double>(index) * step_; }
  /// Position of lattice index i in a vector laid out from -b to b.
  std::size_t offset(std::int64_t index) const noexcept {
    return static_cast<std::size_t>(index + half_count_);
  }
  bool contains_index(std::int64_t index) const noexcept {
    return index >= -half_count_ && index <= half_count_;
  }
  /// Lattice index of t when t is a grid point (to 1e-9 of a step).
  std::optional<std::int64_t> index_of(double t) const;

  std::vector<double> points() const;

  bool operator==(const Grid& other) const = default;

 private:
  Grid() = default;
  double step_ = 1.0;
  std::int64_t half_count_ = 0;
};

/// Number of lattice steps covering length `length`, rounded up, tolerant to
/// floating noise (1e-9 of a step).
std::int64_t steps_covering(double length, double step);

}  // namespace brsim
