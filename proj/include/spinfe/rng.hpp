#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spinfe {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream seed derived from a master seed and a counter, so replications
// are independent and reproducible regardless of evaluation order.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t counter = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(substream(seed, counter)),
                    static_cast<std::uint32_t>(substream(seed, counter) >> 32),
                    static_cast<std::uint32_t>(substream(seed, counter + 1)),
                    static_cast<std::uint32_t>(substream(seed, counter + 1) >> 32)};
  return std::mt19937_64(seq);
}

// Welford accumulator for mean and standard error.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  long count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace spinfe
