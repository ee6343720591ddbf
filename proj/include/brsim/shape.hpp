#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "brsim/gauss.hpp"
#include "brsim/grid.hpp"
#include "brsim/random_stream.hpp"

namespace brsim {

/// Lattice function F with F(0) = 0 and F <= 0, maximal at 0 (smallest-point
/// tie-breaking), on the window (p Z) cap [-w, w].
struct ShapeFunction {
  Grid window;
  std::vector<double> values;

  double at(std::int64_t index) const { return values[window.offset(index)]; }
};

struct ShapeDraw {
  ShapeFunction shape;
  std::uint64_t attempts = 0;  // including the accepted one
};

/// Source of shapes for method 4. Implementations must be safe to call from
/// several threads with distinct streams.
class ShapeSource {
 public:
  virtual ~ShapeSource() = default;
  virtual const Grid& window() const = 0;
  virtual ShapeDraw draw(RandomStream& rng) const = 0;
};

/// Rejection sampler for Q^(p): draw xi on the window, accept iff its smallest
/// lattice argmax is 0.
class RejectionShapeSource final : public ShapeSource {
 public:
  static constexpr std::uint64_t kRejectionBudget = 1'000'000;

  /// Throws InvalidWindow unless w >= 4, InvalidLattice unless w is a multiple of p.
  RejectionShapeSource(const VariogramModel& model, double step, double window);
  explicit RejectionShapeSource(std::shared_ptr<const CovarianceFactor> factor);

  const Grid& window() const override { return factor_->grid(); }
  const CovarianceFactor& factor() const noexcept { return *factor_; }

  /// Throws RejectionBudgetExceeded after kRejectionBudget consecutive rejections.
  ShapeDraw draw(RandomStream& rng) const override;

 private:
  std::shared_ptr<const CovarianceFactor> factor_;
};

ShapeFunction sample_shape(const VariogramModel& model, double step, double window, RandomStream& rng);

/// w = b + 20 * max(1, (2 s)^{1/(2 - alpha)}), rounded up to a multiple of p.
double default_shape_window(const VariogramModel& model, double b, double step);

struct LambdaEstimate {
  double lambda_p = 0.0;        // per unit length
  double standard_error = 0.0;  // of lambda_p
  double acceptance_rate = 0.0; // empirical P(T^(p) = 0)
  std::uint64_t n_samples = 0;
};

/// lambda_p = (1/(n p)) sum_j e^{M_j} 1{T_j = 0} over unconditioned drifted
/// paths on the window. Throws ZeroAcceptance when no path has T = 0.
LambdaEstimate estimate_lambda_p(const VariogramModel& model, double step, double window,
                                 std::uint64_t n_samples, RandomStream& rng);
LambdaEstimate estimate_lambda_p(const CovarianceFactor& factor, std::uint64_t n_samples,
                                 RandomStream& rng);

/// JSON sidecar of lambda estimates keyed by (alpha, scale, p, w).
class LambdaCache {
 public:
  /// Reads `path` if it exists. Throws IoError on unreadable or malformed files.
  explicit LambdaCache(std::filesystem::path path);

  static std::string key(const VariogramModel& model, double step, double window);

  std::optional<LambdaEstimate> find(const std::string& key) const;
  void put(const std::string& key, const LambdaEstimate& estimate);
  /// Throws IoError.
  void save() const;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::map<std::string, LambdaEstimate> entries_;
};

}  // namespace brsim
