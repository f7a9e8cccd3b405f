#include "aitc/prng.hpp"

#include "aitc/normal.hpp"

namespace aitc::prng {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void round_once(std::array<std::uint64_t, 4>& c,
                       const std::array<std::uint64_t, 2>& k) {
  const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * c[0];
  const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * c[2];
  const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
  const auto lo0 = static_cast<std::uint64_t>(p0);
  const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
  const auto lo1 = static_cast<std::uint64_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) {
  round_once(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    round_once(counter, key);
  }
  return counter;
}

std::uint64_t Stream::u64(std::uint64_t index) const {
  const std::uint64_t block = index >> 2;
  if (block != cached_block_) {
    buffer_ = philox4x64({block, 0, 0, 0}, key_);
    cached_block_ = block;
  }
  return buffer_[index & 3];
}

double Stream::uniform(std::uint64_t index) const {
  return (static_cast<double>(u64(index) >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal(std::uint64_t index) const {
  return normal::quantile(uniform(index));
}

}  // namespace aitc::prng
