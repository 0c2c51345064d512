#pragma once

// Deterministic, counter-based random streams. Every draw is a pure function
// of (seed, index), so identically seeded runs reproduce identical sequences
// regardless of call order elsewhere, and the scheme is simple enough to
// reimplement bit-for-bit in another language:
//
//   raw(seed, i)  = splitmix64_finalizer(seed + (i + 1) * 0x9E3779B97F4A7C15)
//   u(seed, i)    = ((raw >> 11) + 1) * 2^-53          in (0, 1]
//   normal pair j = Box-Muller on (u(2j), u(2j+1)):
//                   r = sqrt(-2 ln u1); z0 = r cos(2 pi u2); z1 = r sin(2 pi u2)

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace rnqg {

inline std::uint64_t splitmix64_finalizer(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_raw(std::uint64_t seed, std::uint64_t index) {
  return splitmix64_finalizer(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

/// Uniform double in (0, 1]; the +1 keeps log() finite in Box-Muller.
inline double counter_uniform(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>((counter_raw(seed, index) >> 11) + 1) * 0x1.0p-53;
}

/// Derives an independent substream seed for a named purpose.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64_finalizer(seed ^ (0x6A09E667F3BCC909ull + tag));
}

/// Standard-normal stream over the counter-based uniforms.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}

  double next() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = counter_uniform(seed_, 2 * pair_index_);
    const double u2 = counter_uniform(seed_, 2 * pair_index_ + 1);
    ++pair_index_;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t pair_index_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

inline std::vector<double> gaussian_stream(std::uint64_t seed, std::size_t count) {
  GaussianStream stream(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = stream.next();
  return out;
}

}  // namespace rnqg
