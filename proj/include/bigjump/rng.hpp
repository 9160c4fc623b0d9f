#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace bigjump {

// Identifies one reproducible block of draws. Every sample the toolkit ever
// generates is a pure function of (master_seed, stream_id, chunk_index, counter),
// so any worker can regenerate any block and parallel runs merge deterministically.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t chunk_index = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// SplitMix64 finalizer (Vigna). Full 64-bit avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t master, std::uint64_t stream,
                                   std::uint64_t chunk) {
  std::uint64_t k = mix64(master);
  k = mix64(k ^ (stream * 0xd1342543de82ef95ULL));
  k = mix64(k ^ (chunk * 0x9e3779b97f4a7c15ULL));
  return k;
}

// Counter-mode SplitMix64: output i is mix64 of key + i*gamma. Stateless, so
// sample i can be produced without generating samples 0..i-1.
class CounterRng {
 public:
  explicit CounterRng(const SeedSpec& s)
      : key_(derive_key(s.master_seed, s.stream_id, s.chunk_index)) {}

  CounterRng(std::uint64_t master, std::uint64_t stream, std::uint64_t chunk)
      : key_(derive_key(master, stream, chunk)) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on the open interval (0,1); both log(u) and log1p(-u) stay finite.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16).
// Relative error below 1e-15 over (0,1).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("inverse_normal_cdf: p must lie in (0,1)");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace bigjump
