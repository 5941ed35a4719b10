#pragma once

#include <cstdint>
#include <limits>

namespace ehpc {

/// SplitMix64: 64-bit state, one add and a finalizer per output. Satisfies
/// UniformRandomBitGenerator, so it plugs into <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return finalize(state_);
  }

  static constexpr std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

using Rng = SplitMix64;

/// Independent purposes drawn from the same (seed, replica, slot) key.
enum class StreamTag : std::uint64_t {
  kArrival = 1,
  kChannel = 2,
  kRollout = 3,
  kQuantile = 4,
};

/// Counter-based stream derivation: every (seed, replica, slot, tag) tuple
/// yields its own generator, so draws for a slot never depend on how many
/// numbers other slots consumed.
constexpr Rng make_stream(std::uint64_t seed, std::uint64_t replica, std::uint64_t slot,
                          StreamTag tag) {
  std::uint64_t h = SplitMix64::finalize(seed ^ 0x6a09e667f3bcc908ULL);
  h = SplitMix64::finalize(h ^ (replica + 0x9e3779b97f4a7c15ULL));
  h = SplitMix64::finalize(h ^ (slot * 0xd1b54a32d192ed03ULL + 0xbb67ae8584caa73bULL));
  h = SplitMix64::finalize(h ^ static_cast<std::uint64_t>(tag));
  return Rng(h);
}

}  // namespace ehpc
