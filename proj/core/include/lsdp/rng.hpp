#pragma once

#include <cstdint>
#include <limits>

namespace lsdp {

/// Counter-based generator: draw i of stream (seed, stream) is a pure
/// function mix(key(seed, stream) + (i + 1) * golden), where mix is the
/// SplitMix64 finalizer. Streams are value types; copying one forks it.
///
/// Satisfies UniformRandomBitGenerator, but the library only uses its own
/// uniform()/normal() so that golden values do not depend on the standard
/// library's distribution implementations.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal by Box-Muller: consumes two uniforms u1, u2 and returns
  /// sqrt(-2 ln(1 - u1)) * cos(2 pi u2). The sine branch is discarded.
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace lsdp
