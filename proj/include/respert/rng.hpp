#pragma once

#include <cstdint>
#include <initializer_list>

namespace respert {

// SplitMix64. Every sampler in this library consumes draws from one of these
// in a documented order (one uniform per candidate vertex pair), so results
// are bit-reproducible for a fixed seed regardless of platform or thread
// count.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

// Stream discipline: the replicate with index r of the stream tagged t uses
// derive_seed(master, {t, ...context..., r}). Workers never share generator
// state, which makes fan-out order irrelevant to the output.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> parts) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t p : parts) {
    h = mix(h ^ (p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  }
  return h;
}

}  // namespace respert
