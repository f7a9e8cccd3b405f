#pragma once

#include <array>
#include <cstdint>
#include <string_view>

// Counter-based generator: Philox4x64 with 10 rounds, bit-compatible with
// the widely used reference implementation.  Every draw is a pure function
// of (seed, stream, index), which is what makes the covariate-simulation
// protocol reproducible across parties: both sponsors get byte-identical
// matrices from the seed the arbitrator prespecifies.

namespace aitc::prng {

inline constexpr std::string_view kAlgorithmId = "philox4x64-10";

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{seed, stream_id} {}

  // Random access by draw index.
  std::uint64_t u64(std::uint64_t index) const;
  // Uniform on (0,1), never exactly 0 or 1.
  double uniform(std::uint64_t index) const;
  // Standard normal via the inverse CDF (deterministic, platform-stable).
  double normal(std::uint64_t index) const;

  std::uint64_t next_u64() { return u64(cursor_++); }
  double next_uniform() { return uniform(cursor_++); }
  double next_normal() { return normal(cursor_++); }

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t cursor_ = 0;
  mutable std::uint64_t cached_block_ = ~0ULL;
  mutable std::array<std::uint64_t, 4> buffer_{};
};

// Stream ids composed from a purpose tag and a replicate/offset, so that
// simulation replicates and protocol roles never share a stream.
constexpr std::uint64_t stream_id(std::uint32_t purpose,
                                  std::uint64_t offset = 0) {
  return (static_cast<std::uint64_t>(purpose) << 48) ^ offset;
}

}  // namespace aitc::prng
