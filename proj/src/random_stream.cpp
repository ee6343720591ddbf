#include "brsim/random_stream.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace brsim {

namespace {

using FastDoublePolicy =
    boost::math::policies::policy<boost::math::policies::promote_double<false>>;

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// The key words are folded into one 64-bit seed; seed_seq over the full
// 312-word state costs ~8us per path, which dominates short paths.
std::mt19937_64 seeded_engine(const SubstreamKey& key) {
  std::uint64_t h = 0x6a09e667f3bcc909ull;
  for (const std::uint64_t w : {key.seed, key.cell, key.method, key.replication, key.block, key.path}) {
    h = mix((h + 0x9e3779b97f4a7c15ull) ^ w);
  }
  return std::mt19937_64(h);
}

}  // namespace

RandomStream::RandomStream(const SubstreamKey& key) : engine_(seeded_engine(key)) {}

RandomStream::RandomStream(std::uint64_t seed) : RandomStream(SubstreamKey{.seed = seed}) {}

double RandomStream::uniform() {
  ++draws_;
  // 53 random bits, shifted by half an ulp so that 0 and 1 are never returned.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_quantile(uniform()); }

double RandomStream::exponential(double rate) { return -std::log(uniform()) / rate; }

std::uint64_t RandomStream::index(std::uint64_t n) {
  const auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

double normal_quantile(double u) {
  return -M_SQRT2 * boost::math::erfc_inv(2.0 * u, FastDoublePolicy());
}

}  // namespace brsim
