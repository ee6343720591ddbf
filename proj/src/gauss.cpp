#include "brsim/gauss.hpp"

#include <array>
#include <cmath>
#include <string>

#include "brsim/errors.hpp"

namespace brsim {

namespace {

std::vector<std::int64_t> center_out_order(std::int64_t half_count) {
  std::vector<std::int64_t> order;
  order.reserve(static_cast<std::size_t>(2 * half_count));
  for (std::int64_t i = 1; i <= half_count; ++i) {
    order.push_back(i);
    order.push_back(-i);
  }
  return order;
}

}  // namespace

Eigen::MatrixXd CovarianceFactor::covariance() const {
  const auto n = static_cast<Eigen::Index>(row_index_.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = grid_.point(row_index_[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double tj = grid_.point(row_index_[static_cast<std::size_t>(j)]);
      const double v = model_.gamma(ti) + model_.gamma(tj) - model_.gamma(ti - tj);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

CovarianceFactor build_covariance(const VariogramModel& model, const Grid& grid) {
  model.validate();
  CovarianceFactor factor(model, grid);
  factor.row_index_ = center_out_order(grid.half_count());
  factor.half_variance_.reserve(factor.row_index_.size());
  for (const auto index : factor.row_index_) {
    factor.half_variance_.push_back(model.gamma(grid.point(index)));
  }

  const Eigen::MatrixXd c = factor.covariance();
  constexpr std::array<double, 4> kJitterLadder{0.0, 1e-12, 1e-10, 1e-8};
  for (const double eps : kJitterLadder) {
    Eigen::MatrixXd trial = c;
    if (eps > 0.0) trial.diagonal() *= (1.0 + eps);
    Eigen::LLT<Eigen::MatrixXd> llt(trial);
    if (llt.info() == Eigen::Success) {
      factor.lower_ = llt.matrixL();
      factor.jitter_ = eps;
      return factor;
    }
  }
  throw Error(ErrorKind::NonPositiveDefinite,
              "covariance not factorizable for alpha=" + std::to_string(model.alpha) +
                  ", scale=" + std::to_string(model.scale) + ", " + std::to_string(grid.size()) +
                  " grid points");
}

DriftedPath sample_drifted_path(const CovarianceFactor& factor, RandomStream& rng, Drift drift) {
  const auto& rows = factor.row_index();
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd z(n);
  for (Eigen::Index k = 0; k < n; ++k) z(k) = rng.normal();
  const Eigen::VectorXd w = factor.lower().triangularView<Eigen::Lower>() * z;

  DriftedPath path{factor.grid(), std::vector<double>(factor.grid().size(), 0.0)};
  const auto& half_variance = factor.half_variance();
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double drift_term = drift == Drift::Standard ? half_variance[idx] : 0.0;
    path.values[path.grid.offset(rows[idx])] = w(k) - drift_term;
  }
  return path;
}

std::optional<DriftedPath> sample_drifted_path_while(
    const CovarianceFactor& factor, RandomStream& rng,
    const std::function<bool(std::int64_t, double)>& keep) {
  const auto& rows = factor.row_index();
  const auto& lower = factor.lower();
  const auto& half_variance = factor.half_variance();
  const auto n = static_cast<Eigen::Index>(rows.size());

  Eigen::VectorXd z(n);
  DriftedPath path{factor.grid(), std::vector<double>(factor.grid().size(), 0.0)};
  for (Eigen::Index k = 0; k < n; ++k) {
    z(k) = rng.normal();
    const double w = lower.row(k).head(k + 1).dot(z.head(k + 1));
    const auto idx = static_cast<std::size_t>(k);
    const double value = w - half_variance[idx];
    if (!keep(rows[idx], value)) return std::nullopt;
    path.values[path.grid.offset(rows[idx])] = value;
  }
  return path;
}

std::int64_t smallest_argmax(const DriftedPath& path) {
  const std::int64_t half = path.grid.half_count();
  std::int64_t best = -half;
  double best_value = path.at(-half);
  for (std::int64_t i = -half + 1; i <= half; ++i) {
    if (path.at(i) > best_value) {
      best_value = path.at(i);
      best = i;
    }
  }
  return best;
}

}  // namespace brsim
