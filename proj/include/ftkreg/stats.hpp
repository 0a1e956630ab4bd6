#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace ftkreg {

/// Standard normal quantile: Acklam's rational approximation polished by one
/// Halley step (absolute error well below 1e-12 on (1e-300, 1 - 1e-16)).
double normal_quantile(double p);
double normal_cdf(double x);

inline double expit(double u) {
  return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

/// Sample quantile by linear interpolation of order statistics (R type 7).
/// `sorted` must be ascending and nonempty.
double quantile_type7(std::span<const double> sorted, double p);

struct Summary {
  double q25 = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double q75 = 0.0;
};

/// Q25 / median / mean / Q75; throws EmptyInput on an empty vector.
Summary summarize(std::span<const double> values);

/// Counter-based generator: output i of stream (seed, stream) is a fixed hash
/// of (key, i), so streams are reproducible and independent of scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() noexcept;
  /// Uniform on (0, 1).
  double uniform() noexcept;
  double normal() noexcept;
  /// Unit-mean exponential.
  double exponential() noexcept;
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  static std::uint64_t mix(std::uint64_t z) noexcept;
  /// Key for a named substream of a root seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ftkreg
