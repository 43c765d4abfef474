#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lgrav {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-derived stream: stream k of master seed s depends only on (s, k).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  static Rng substream(std::uint64_t master, std::uint64_t k) {
    return Rng(splitmix64(splitmix64(master) ^ splitmix64(k + 0x632BE59BD9B4E019ULL)));
  }

  void reseed(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(splitmix64(seed)),
                      static_cast<std::uint32_t>(splitmix64(seed) >> 32)};
    engine_.seed(seq);
    normal_.reset();
  }

  // Uniform on (0, 1).
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }
  double exponential() { return -std::log(uniform()); }
  double normal() { return normal_(engine_); }
  double gamma(double shape) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(engine_);
  }
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<long> dist(mean);
    return dist(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace lgrav
