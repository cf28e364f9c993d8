#include "strata/eval/statistics.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

#include "strata/common/error.h"

namespace strata::eval {

namespace {

constexpr double kZ95 = 1.959964;

double z_for(double confidence) {
  if (std::abs(confidence - 0.95) < 1e-12) return kZ95;
  if (confidence <= 0.0 || confidence >= 1.0) throw InputError("confidence must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
}

}  // namespace

double mcnemar_mid_p(std::uint64_t b, std::uint64_t c) {
  const std::uint64_t n = b + c;
  if (n == 0) return 1.0;
  const std::uint64_t k = std::min(b, c);
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), 0.5);
  const double below = k == 0 ? 0.0 : boost::math::cdf(dist, static_cast<double>(k - 1));
  const double at = boost::math::pdf(dist, static_cast<double>(k));
  return std::min(1.0, 2.0 * below + at);
}

Interval wilson_ci(std::uint64_t successes, std::uint64_t n, double confidence) {
  if (successes > n) throw InputError("successes exceed sample size");
  if (n == 0) return {0.0, 1.0};
  const double z = z_for(confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (successes == 0) ci.lo = 0.0;
  if (successes == n) ci.hi = 1.0;
  return ci;
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

BootstrapResult paired_bootstrap_ci(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                                    std::size_t resamples, std::uint64_t seed, double confidence) {
  if (a.size() != b.size()) throw InputError("paired bootstrap needs equally long outcome vectors");
  BootstrapResult r;
  r.resamples = resamples;
  const std::size_t n = a.size();
  if (n == 0) return r;

  auto delta = [&](auto&& pick) {
    long diff = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = pick(i);
      diff += static_cast<long>(b[j] != 0) - static_cast<long>(a[j] != 0);
    }
    return 100.0 * static_cast<double>(diff) / static_cast<double>(n);
  };
  r.delta_pp = delta([](std::size_t i) { return i; });

  std::mt19937_64 rng(seed);
  std::vector<double> deltas;
  deltas.reserve(resamples);
  for (std::size_t s = 0; s < resamples; ++s) {
    deltas.push_back(delta([&](std::size_t) { return static_cast<std::size_t>(bounded_draw(rng, n)); }));
  }
  std::sort(deltas.begin(), deltas.end());
  const double tail = (1.0 - confidence) / 2.0;
  r.ci_pp = {percentile(deltas, tail), percentile(deltas, 1.0 - tail)};
  return r;
}

}  // namespace strata::eval
