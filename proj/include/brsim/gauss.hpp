#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "brsim/grid.hpp"
#include "brsim/random_stream.hpp"

namespace brsim {

/// Cholesky factor of the covariance of the pinned field W over the nonzero
/// points of a grid. Immutable after construction and safe to share.
///
/// Rows are ordered center-out (p, -p, 2p, -2p, ...), so the first rows of
/// L z only need the first normals; see sample_drifted_path_while.
class CovarianceFactor {
 public:
  const VariogramModel& model() const noexcept { return model_; }
  const Grid& grid() const noexcept { return grid_; }
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  /// Lower-triangular L with L L^T = C (+ jitter on the diagonal).
  const Matrix& lower() const noexcept { return lower_; }
  /// Lattice index of factor row k.
  const std::vector<std::int64_t>& row_index() const noexcept { return row_index_; }
  /// gamma(t_k) = sigma^2(t_k) / 2 per factor row.
  const std::vector<double>& half_variance() const noexcept { return half_variance_; }
  /// Relative diagonal jitter that was needed (0 when none).
  double jitter() const noexcept { return jitter_; }

  /// C_ij = gamma(t_i) + gamma(t_j) - gamma(t_i - t_j) in factor-row order.
  Eigen::MatrixXd covariance() const;

 private:
  friend CovarianceFactor build_covariance(const VariogramModel&, const Grid&);
  CovarianceFactor(VariogramModel model, Grid grid) : model_(model), grid_(grid) {}

  VariogramModel model_;
  Grid grid_;
  Matrix lower_;
  std::vector<std::int64_t> row_index_;
  std::vector<double> half_variance_;
  double jitter_ = 0.0;
};

/// Throws NonPositiveDefinite when even the largest jitter fails.
CovarianceFactor build_covariance(const VariogramModel& model, const Grid& grid);

/// xi(t) = W(t) - sigma^2(t)/2 on every point of a grid; xi(0) = 0 exactly.
struct DriftedPath {
  Grid grid;
  std::vector<double> values;  // laid out from -b to b

  double at(std::int64_t index) const { return values[grid.offset(index)]; }
};

enum class Drift {
  Standard,  ///< W - sigma^2/2
  Omitted,   ///< W only; a deliberately broken field for negative controls
};

/// Consumes exactly grid.size() - 1 normals.
DriftedPath sample_drifted_path(const CovarianceFactor& factor, RandomStream& rng,
                                Drift drift = Drift::Standard);

/// Evaluates the path row by row in center-out order, calling
/// `keep(index, value)` after each point. Returns nullopt as soon as `keep`
/// returns false; one normal is consumed per evaluated point.
std::optional<DriftedPath> sample_drifted_path_while(
    const CovarianceFactor& factor, RandomStream& rng,
    const std::function<bool(std::int64_t, double)>& keep);

/// Predicate state for "the smallest lattice argmax is 0": rejects the first
/// point with xi(t) > 0, or xi(t) >= 0 for t < 0.
inline bool argmax_stays_at_origin(std::int64_t index, double value) {
  return index < 0 ? value < 0.0 : value <= 0.0;
}

/// Smallest lattice index attaining the maximum of a path ("inf argsup").
std::int64_t smallest_argmax(const DriftedPath& path);

}  // namespace brsim
