#pragma once

#include <array>
#include <cstdint>

// Counter-based random streams. Every variate is addressed by
// (seed, path, stream, index), so batches are reproducible under any
// execution schedule and refinement runs can share a noise stream
// variate-for-variate.

namespace junction {

struct PhiloxCounter {
  std::uint64_t v0 = 0, v1 = 0, v2 = 0, v3 = 0;
};

struct PhiloxKey {
  std::uint64_t k0 = 0, k1 = 0;
};

// Philox4x64-10. Returns the four output words for the counter as given.
std::array<std::uint64_t, 4> philox4x64(PhiloxCounter ctr, PhiloxKey key);

// Inverse standard normal CDF (Wichura's AS 241, double precision).
// Domain (0,1); throws std::domain_error outside.
double inverse_normal_cdf(double p);

// Standard normal CDF, accurate in both tails.
double normal_cdf(double z);

// One logical random stream of a path: stream 0 carries the Gaussian
// increments (one per grid step), stream 1 the uniform edge draws.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path_index)
      : key_{seed, path_index} {}

  // k-th standard normal of the Gaussian stream.
  double gaussian(std::uint64_t k) const;

  // k-th uniform in [0,1) of the edge-draw stream.
  double uniform(std::uint64_t k) const;

  // Raw word of (stream, index); uniforms/gaussians are derived from these.
  std::uint64_t word(std::uint64_t stream, std::uint64_t index) const;

  // Four consecutive raw words (indices 4*block .. 4*block+3) of a stream.
  std::array<std::uint64_t, 4> block(std::uint64_t stream,
                                     std::uint64_t block_index) const;

 private:
  PhiloxKey key_;
};

// Sequential reader over a PathStream's Gaussian lane. Same values as
// PathStream::gaussian(k) for k = 0,1,2,..., one block decode per four
// variates.
class GaussianScan {
 public:
  explicit GaussianScan(const PathStream& s) : stream_(&s) {}
  double next();

 private:
  const PathStream* stream_;
  std::uint64_t next_index_ = 0;
  std::array<std::uint64_t, 4> block_{};
};

// Maps a raw 64-bit word to the open interval (0,1).
double uniform_open(std::uint64_t w);

}  // namespace junction
