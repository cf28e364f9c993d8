#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace strata::eval {

// Two-sided exact McNemar mid-p over the discordant counts b and c:
// min(1, 2 P(X < k) + P(X = k)) with X ~ Binomial(b + c, 1/2), k = min(b, c).
// No discordant pairs gives 1.
double mcnemar_mid_p(std::uint64_t b, std::uint64_t c);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a proportion. Empty samples give [0, 1].
Interval wilson_ci(std::uint64_t successes, std::uint64_t n, double confidence = 0.95);

struct BootstrapResult {
  double delta_pp = 0.0;  // mean(b) - mean(a), percentage points
  Interval ci_pp;
  std::size_t resamples = 0;
};

// Paired percentile bootstrap of the accuracy difference. Resampling uses
// std::mt19937_64 seeded with `seed` and an unbiased bounded draw, so the
// interval is reproducible across platforms.
BootstrapResult paired_bootstrap_ci(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                                    std::size_t resamples = 2000, std::uint64_t seed = 42, double confidence = 0.95);

// Linear interpolation between closest ranks; `sorted` must be ascending.
double percentile(std::span<const double> sorted, double q);

// Uniform integer in [0, bound) from a 64-bit generator by rejection.
template <typename Rng>
std::uint64_t bounded_draw(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace strata::eval
