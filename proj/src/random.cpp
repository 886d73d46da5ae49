#include "fbs/random.h"

#include <cmath>
#include <numbers>

#include "fbs/errors.h"

namespace fbs {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

// High bit of word 1 separates the normal and uniform counter ranges.
constexpr std::uint64_t kUniformRange = std::uint64_t{1} << 63;

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

NormalStream::NormalStream(const SeedSpec& seed, std::uint32_t channel) {
  if (seed.stream_id >> 48) throw DomainError("stream id must be below 2^48");
  if (channel >> 16) throw DomainError("channel must be below 2^16");
  key_ = {static_cast<std::uint32_t>(seed.master_seed),
          static_cast<std::uint32_t>(seed.master_seed >> 32)};
  w2_ = static_cast<std::uint32_t>(seed.stream_id);
  w3_ = static_cast<std::uint32_t>((seed.stream_id >> 32) << 16) | channel;
}

std::array<std::uint32_t, 4> NormalStream::block(std::uint64_t b) const {
  return philox4x32({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), w2_, w3_},
                    key_);
}

double NormalStream::operator()(std::uint64_t index) const {
  // Box-Muller on one block gives the pair (2i, 2i+1).
  const auto r = block(index >> 1);
  const double u1 = 1.0 - to_unit(r[0], r[1]);  // (0, 1]
  const double u2 = to_unit(r[2], r[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  return (index & 1u) ? rad * std::sin(ang) : rad * std::cos(ang);
}

void NormalStream::fill(std::vector<double>& out, std::uint64_t first) const {
  std::size_t i = 0;
  std::uint64_t idx = first;
  if ((idx & 1u) && i < out.size()) out[i++] = (*this)(idx++);
  while (i + 1 < out.size()) {
    const auto r = block(idx >> 1);
    const double u1 = 1.0 - to_unit(r[0], r[1]);
    const double u2 = to_unit(r[2], r[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    out[i++] = rad * std::cos(ang);
    out[i++] = rad * std::sin(ang);
    idx += 2;
  }
  if (i < out.size()) out[i] = (*this)(idx);
}

double NormalStream::uniform(std::uint64_t index) const {
  const auto r = block(kUniformRange | (index >> 1));
  return (index & 1u) ? to_unit(r[2], r[3]) : to_unit(r[0], r[1]);
}

}  // namespace fbs
