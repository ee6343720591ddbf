#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace brsim {

/// Identifies one independent random substream. Every point stream and every
/// simulated path owns exactly one substream, so results do not depend on the
/// order in which paths are generated or on the number of worker threads.
struct SubstreamKey {
  std::uint64_t seed = 0;
  std::uint64_t cell = 0;         // study cell (method x alpha); 0 outside studies
  std::uint64_t method = 0;
  std::uint64_t replication = 0;
  std::uint64_t block = 0;        // block j (method 1: stream j, method 3: lattice block)
  std::uint64_t path = 0;         // path index i, or kPointStreamSlot

  /// Path slot reserved for the Poisson point stream of a block.
  static constexpr std::uint64_t kPointStreamSlot = std::numeric_limits<std::uint64_t>::max();
  /// Replication slot reserved for pilot runs (quantile estimation, lambda estimation).
  static constexpr std::uint64_t kPilotReplication = std::numeric_limits<std::uint64_t>::max();

  static std::uint64_t block_id(std::int64_t j) { return static_cast<std::uint64_t>(j); }
};

/// Uniform, normal and exponential variates from one substream.
///
/// Consumption is exactly one engine output per variate: normals use the
/// inverse CDF, exponentials use -log(U)/rate, lattice indices use floor(U*n).
class RandomStream {
 public:
  explicit RandomStream(const SubstreamKey& key);
  explicit RandomStream(std::uint64_t seed);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential(double rate);
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// Standard normal quantile, accurate to about 1e-16.
double normal_quantile(double u);

}  // namespace brsim
