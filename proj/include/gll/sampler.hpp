#pragma once

// Seedable generation of GLL and LL variates through the gamma-mixture
// representation of T = -log X.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "gll/params.hpp"

namespace gll {

namespace detail {

/// exp(-t) kept representable inside (0, 1).
inline double to_unit(double t) {
  const double x = std::exp(-t);
  if (x >= 1.0) return std::nextafter(1.0, 0.0);
  if (x <= 0.0) return std::numeric_limits<double>::denorm_min();
  return x;
}

}  // namespace detail

/// Deterministic uniform stream on the open interval (0, 1).
class RngState {
 public:
  explicit RngState(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// 53-bit uniform, offset by half an ulp so 0 and 1 never occur.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Gamma(shape, rate) for shape >= 1: shape = 1 is -log(U)/rate, otherwise
/// Cheng's GB rejection algorithm.
inline double gamma_variate(double shape, double rate, RngState& rng) {
  if (!(shape >= 1.0) || !std::isfinite(shape)) throw std::domain_error("gamma_variate: shape must be >= 1");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::domain_error("gamma_variate: rate must be positive");
  if (shape == 1.0) return -std::log(rng.uniform()) / rate;
  const double a = 1.0 / std::sqrt(2.0 * shape - 1.0);
  const double b = shape - std::log(4.0);
  const double q = shape + 1.0 / a;
  const double theta = 4.5;
  const double d = 1.0 + std::log(theta);
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double v = a * std::log(u1 / (1.0 - u1));
    const double y = shape * std::exp(v);
    const double z = u1 * u1 * u2;
    const double w = b + q * v - y;
    if (w + d - theta * z >= 0.0 || w >= std::log(z)) return y / rate;
  }
}

/// n draws of X ~ GLL: T ~ Gamma(p+1, theta) with probability lambda theta / (1+p+lambda theta),
/// else Gamma(p+2, theta); X = exp(-T).
inline std::vector<double> sample_gll(const GllParams& g, std::size_t n, RngState& rng) {
  validate(g);
  const double weight = g.lambda * g.theta / (1.0 + g.p + g.lambda * g.theta);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t;
    if (weight > 0.0 && rng.uniform() <= weight) {
      t = gamma_variate(g.p + 1.0, g.theta, rng);
    } else {
      t = gamma_variate(g.p + 2.0, g.theta, rng);
    }
    out.push_back(detail::to_unit(t));
  }
  return out;
}

/// n draws of X ~ LL(theta, lambda) using only logarithms of uniforms.
inline std::vector<double> sample_ll(double theta, double lambda, std::size_t n, RngState& rng) {
  validate(GllParams{theta, lambda, 0.0});
  const double weight = lambda * theta / (1.0 + lambda * theta);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = -std::log(rng.uniform()) / theta;
    if (!(weight > 0.0 && rng.uniform() <= weight)) t -= std::log(rng.uniform()) / theta;
    out.push_back(detail::to_unit(t));
  }
  return out;
}

}  // namespace gll
