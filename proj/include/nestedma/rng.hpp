#ifndef NESTEDMA_RNG_HPP
#define NESTEDMA_RNG_HPP

#include <array>
#include <cstdint>

namespace nestedma {

// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3" (SC 2011).
// Philox 4x32-10: the output block is a pure function of (key, counter), so
// streams keyed by (seed, n, replicate, purpose) are reproducible in any
// execution order and need no shared state between replicates.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t n, std::uint32_t replicate,
            std::uint32_t purpose);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_double();

  /// Standard normal via Box-Muller on the uniform stream.
  double next_normal();

 private:
  std::array<std::uint32_t, 4> block(std::uint32_t index) const;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 3> fixed_;  // purpose, n, replicate
  std::uint32_t block_index_ = 0;
  std::uint64_t cached_u64_ = 0;
  bool has_cached_u64_ = false;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Stream purposes. Redraw attempts after a rank failure shift the tag by
// kPurposeAttemptStride so every attempt reads an independent stream.
inline constexpr std::uint32_t kPurposeDesign = 1;
inline constexpr std::uint32_t kPurposeNoise = 2;
inline constexpr std::uint32_t kPurposeAttemptStride = 256;

}  // namespace nestedma

#endif
