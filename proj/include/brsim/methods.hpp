#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "brsim/gauss.hpp"
#include "brsim/grid.hpp"
#include "brsim/shape.hpp"

namespace brsim {

enum class Margins { Gumbel, Frechet };
enum class StopReason { FixedK, Adaptive };

std::string to_string(Margins margins);
std::string to_string(StopReason reason);
/// Throws ConfigError for anything but "gumbel" / "frechet".
Margins parse_margins(const std::string& text);

struct FieldRealization {
  Grid grid;
  std::vector<double> values;  // laid out from -b to b
  std::uint64_t paths_used = 0;
  StopReason stop_reason = StopReason::FixedK;
  Margins margins = Margins::Gumbel;

  double at(std::int64_t index) const { return values[grid.offset(index)]; }
};

/// Zero / empty fields mean "use the default for this grid"; see resolve().
struct MethodConfig {
  int method = 0;
  /// Path budget: total points (0, 2, 4) or points per stream/block (1, 3).
  std::uint64_t k_max = 100000;
  /// 0-2: heuristic stop X_{k+1} + q_hi < C_k. 3-4: exact stop X < C_k.
  bool adaptive = true;

  std::vector<double> shifts;            // method 1, lattice multiples; default {-b, 0, b}
  double translation_half_width = 0.0;   // method 2, I = [-v, v]; default v = b
  std::int64_t j_max = 0;                // method 3; default round((b + 10) / p)
  std::int64_t j_min = 0;                // method 3; default -j_max
  int m = 1;                             // method 3 block width in steps
  double window = 0.0;                   // method 4 site window v; default b + 10
  std::optional<double> lambda_p;        // method 4; estimated when absent
  double shape_window = 0.0;             // methods 3-4 argmax window; default below
  std::uint64_t lambda_samples = 1'000'000;

  Margins margins = Margins::Gumbel;
  Drift drift = Drift::Standard;         // methods 0-2 only; Omitted is a test fixture
};

/// Fills defaults for `grid` and validates. Throws ConfigError, InvalidLattice,
/// InvalidWindow or EmptyMarkSpace naming the offending field.
MethodConfig resolve(MethodConfig config, const Grid& grid);

/// Half width of the lattice window on which paths (0-3) or shapes (4) are
/// simulated, for a resolved config.
double path_window_half_width(const VariogramModel& model, const Grid& grid, const MethodConfig& resolved);

/// Generator for one (model, grid, config, seed, cell). Construction does the
/// per-cell work (covariance factors, the q_hi pilot for methods 0-2, the
/// lambda estimate and shape sampler for method 4); run() is const and
/// thread-safe.
///
/// Substreams, keyed (seed, cell, method, replication, block, path):
///   point stream of stream/block j : (.., j, kPointStreamSlot)
///   path i of stream/block j       : (.., j, i)
/// with j = 0 for methods 0, 2, 4, j = stream index for method 1 and the
/// signed block number for method 3. Pilots use replication kPilotReplication.
class Generator {
 public:
  Generator(const VariogramModel& model, const Grid& grid, const MethodConfig& config, std::uint64_t seed,
            std::uint64_t cell = 0, std::shared_ptr<const ShapeSource> shapes = nullptr);

  FieldRealization run(std::uint64_t replication) const;
  /// Method 3/4 only: same draws, but every stream runs to k_max.
  FieldRealization run_unstopped(std::uint64_t replication) const;

  const MethodConfig& config() const noexcept { return config_; }
  const Grid& grid() const noexcept { return grid_; }
  /// Window of the simulated paths or shapes.
  const Grid& path_window() const;
  double q_hi() const noexcept { return q_hi_; }
  std::optional<double> lambda_p() const noexcept { return config_.lambda_p; }
  std::optional<LambdaEstimate> lambda_estimate() const noexcept { return lambda_estimate_; }

 private:
  FieldRealization run_impl(std::uint64_t replication, bool stop) const;
  FieldRealization method0(std::uint64_t replication) const;
  FieldRealization method1(std::uint64_t replication) const;
  FieldRealization method2(std::uint64_t replication) const;
  FieldRealization method3(std::uint64_t replication, bool stop) const;
  FieldRealization method4(std::uint64_t replication, bool stop) const;
  SubstreamKey key(std::uint64_t replication, std::uint64_t block, std::uint64_t path) const;

  VariogramModel model_;
  Grid grid_;
  MethodConfig config_;
  std::uint64_t seed_;
  std::uint64_t cell_;
  std::shared_ptr<const CovarianceFactor> factor_;
  std::shared_ptr<const ShapeSource> shapes_;
  std::optional<LambdaEstimate> lambda_estimate_;
  double q_hi_ = 0.0;
};

/// Empirical 1 - 1e-4 quantile of max_t xi(t) over `factor`'s grid from
/// `n_paths` pilot paths.
double max_quantile(const CovarianceFactor& factor, std::uint64_t n_paths, const SubstreamKey& pilot,
                    Drift drift = Drift::Standard, double level = 0.9999);

/// One realization; equivalent to Generator(...).run(replication).
FieldRealization simulate(const VariogramModel& model, const Grid& grid, const MethodConfig& config,
                          std::uint64_t seed, std::uint64_t replication = 0);

}  // namespace brsim
