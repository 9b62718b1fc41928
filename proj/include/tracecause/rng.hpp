#pragma once

#include <cstdint>
#include <random>

namespace tracecause {

// Seedable stream of uniform and Gaussian variates.
//
// The engine is std::mt19937_64 seeded through std::seed_seq with the four
// 32-bit halves of (seed, stream_id); both algorithms are fully specified by
// the standard, so a given (seed, stream_id) yields the same sequence on every
// conforming library. Gaussian variates use the Box-Muller transform on
// 53-bit uniforms, generated in pairs; the second value of each pair is
// cached and returned by the next call.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  bool coin() { return (engine_() >> 63) != 0; }

  // Independent stream keyed by `index` under this stream's (seed, stream_id).
  // Does not advance this generator.
  Rng child(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Mixes a parent stream id and a child index into a new stream id.
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index);

// Stream id for trial `trial` at grid point `point`.
inline std::uint64_t trial_stream(std::uint64_t point, std::uint64_t trial) {
  return derive_stream(derive_stream(0x7472616365ULL, point), trial);
}

}  // namespace tracecause
