#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace fbs {

// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;  // replica index; must be < 2^48
};

// Random-access standard normal deviates keyed by (seed, stream, channel, index).
// The counter holds the draw block in words 0-1, the stream in word 2 and the
// upper stream bits plus channel in word 3, so distinct keys never share blocks.
class NormalStream {
 public:
  NormalStream(const SeedSpec& seed, std::uint32_t channel);

  double operator()(std::uint64_t index) const;
  void fill(std::vector<double>& out, std::uint64_t first = 0) const;
  // Uniform in [0,1) with 53 random bits; a separate counter range from the normals.
  double uniform(std::uint64_t index) const;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t w2_;
  std::uint32_t w3_;
  std::array<std::uint32_t, 4> block(std::uint64_t b) const;
};

}  // namespace fbs
