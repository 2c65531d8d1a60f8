#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace locest {

inline constexpr double kSqrt2Pi = 2.5066282746310005024;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal density.
inline double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double log_norm_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

/// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Standard normal survival function 1 - Phi(z), without cancellation.
inline double norm_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Standard normal quantile (Wichura's PPND16 rational approximation).
double norm_quantile(double p);

inline double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a) && a < 0) return a;
  return a + std::log1p(std::exp(b - a));
}

inline uint64_t hash_mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t v) {
  return hash_mix(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

/// Floating-point values printed with 17 significant digits round-trip exactly.
std::string fmt17(double v);

}  // namespace locest
