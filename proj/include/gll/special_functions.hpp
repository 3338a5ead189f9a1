#pragma once

// Scalar special functions used throughout the library: log-gamma, the
// (regularized and non-regularized) upper incomplete gamma function, the
// generalized exponential integral, digamma/trigamma and the normal cdf.
//
// All functions throw std::domain_error on arguments outside their domain
// and never return NaN silently.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gll/errors.hpp"

namespace gll::special {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

inline constexpr int max_iterations = 100000;
inline constexpr double epsilon = 1e-16;
inline constexpr double tiny = 1e-300;

inline void require(bool ok, const char* fn, const std::string& what) {
  if (!ok) throw std::domain_error(std::string(fn) + ": " + what);
}

// Modified Lentz evaluation of the Legendre continued fraction
//   Gamma(a, x) = e^{-x} x^a * cf(a, x),
// valid for every real a and x > 0. Converges quickly for x > a + 1.
inline double upper_gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < max_iterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < epsilon) return h;
  }
  throw convergence_error("incomplete gamma continued fraction did not converge");
}

// Series for the lower incomplete gamma function:
//   gamma(a, x) = e^{-x} x^a * sum_{n>=0} x^n / (a (a+1) ... (a+n)).
inline double lower_gamma_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < max_iterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * epsilon) return sum;
  }
  throw convergence_error("incomplete gamma series did not converge");
}

// (Gamma(1+a) - 1) / a for 0 < a <= 0.25 via log Gamma(1+a) = -euler_gamma a + sum_{k>=2} (-1)^k zeta(k) a^k / k.
inline double gamma1p_m1_over_a(double a) {
  static constexpr double zeta[] = {1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915,
                                    1.0369277551433699263, 1.0173430619844491397, 1.0083492773819228268,
                                    1.0040773561979443394, 1.0020083928260822144, 1.0009945751278180853,
                                    1.0004941886041194646, 1.0002460865533080483};
  double s = -euler_gamma;
  double ak = 1.0;  // a^{k-1}
  for (int k = 2; k <= 40; ++k) {
    ak *= a;
    const double z = k <= 12 ? zeta[k - 2] : 1.0 + std::pow(2.0, -k) + std::pow(3.0, -k) + std::pow(4.0, -k);
    const double term = (k % 2 == 0 ? 1.0 : -1.0) * z * ak / k;
    s += term;
    if (std::fabs(term) < 1e-17) break;
  }
  // log Gamma(1+a) = a s
  const double as = a * s;
  return as == 0.0 ? s : s * (std::expm1(as) / as);
}

// Gamma(a, x) for 0 <= a < 1 and 0 < x <= 2 without the cancellation of
// Gamma(a) - gamma(a, x):
//   Gamma(a, x) = [(Gamma(1+a) - 1) - (x^a - 1)] / a - x^a sum_{k>=1} (-x)^k / (k! (a+k)).
// At a = 0 this is E1(x) = -euler_gamma - log x - sum_{k>=1} (-x)^k / (k k!).
inline double upper_gamma_small_a(double a, double x) {
  const double log_x = std::log(x);
  double head;
  if (a < 1e-300) {
    head = -euler_gamma - log_x;
  } else {
    const double g1 = a <= 0.25 ? gamma1p_m1_over_a(a) : std::expm1(std::lgamma(1.0 + a)) / a;
    const double xa1 = a * log_x == 0.0 ? log_x : std::expm1(a * log_x) / a;
    head = g1 - xa1;
  }
  const double xa = (a < 1e-300) ? 1.0 : std::exp(a * log_x);
  double term = 1.0;  // (-x)^k / k!
  double sum = 0.0;
  for (int k = 1; k < max_iterations; ++k) {
    term *= -x / k;
    const double add = term / (a + k);
    sum += add;
    if (std::fabs(add) < epsilon * std::fabs(sum)) break;
  }
  return head - xa * sum;
}

}  // namespace detail

/// Natural log of the gamma function for a > 0.
inline double log_gamma(double a) {
  detail::require(a > 0.0 && std::isfinite(a), "log_gamma", "argument must be positive");
  return std::lgamma(a);
}

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
inline double gamma_p(double a, double x) {
  detail::require(a > 0.0, "gamma_p", "shape must be positive");
  detail::require(x >= 0.0, "gamma_p", "argument must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) {
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * detail::lower_gamma_series(a, x);
  }
  return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * detail::upper_gamma_cf(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a), a > 0, x >= 0.
inline double gamma_q(double a, double x) {
  detail::require(a > 0.0, "gamma_q", "shape must be positive");
  detail::require(x >= 0.0, "gamma_q", "argument must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) {
    return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * detail::lower_gamma_series(a, x);
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * detail::upper_gamma_cf(a, x);
}

/// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt for a >= 0, x > 0.
/// At a = 0 this is the exponential integral E1(x).
inline double upper_incomplete_gamma(double a, double x) {
  detail::require(a >= 0.0 && std::isfinite(a), "upper_incomplete_gamma", "shape must be >= 0");
  detail::require(x > 0.0, "upper_incomplete_gamma", "argument must be positive");
  if (std::isinf(x)) return 0.0;
  if (x > a + 1.0) return std::exp(-x + a * std::log(x)) * detail::upper_gamma_cf(a, x);
  if (a < 1.0) return detail::upper_gamma_small_a(a, x);
  return std::tgamma(a) * gamma_q(a, x);
}

/// Generalized exponential integral Ei(n, z) = int_1^inf e^{-zt} t^{-n} dt = z^{n-1} Gamma(1-n, z).
inline double gen_exp_integral(double n, double z) {
  detail::require(z > 0.0, "gen_exp_integral", "argument must be positive");
  detail::require(std::isfinite(n), "gen_exp_integral", "order must be finite");
  if (n <= 1.0) return std::pow(z, n - 1.0) * upper_incomplete_gamma(1.0 - n, z);
  if (z >= 1.0) return std::exp(-z) * detail::upper_gamma_cf(1.0 - n, z);
  // n > 1, z < 1: climb n Ei(n+1, z) = e^{-z} - z Ei(n, z) from an order in (0, 1].
  const int steps = static_cast<int>(std::ceil(n - 1.0));
  double m = n - steps;
  double value = std::pow(z, m - 1.0) * upper_incomplete_gamma(1.0 - m, z);
  const double ez = std::exp(-z);
  for (int i = 0; i < steps; ++i) {
    value = (ez - z * value) / m;
    m += 1.0;
  }
  return value;
}

/// Ei(-x) = -int_x^inf e^{-w}/w dw = -E1(x) for x > 0 (always negative).
inline double exp_integral_neg(double x) {
  detail::require(x > 0.0, "exp_integral_neg", "argument must be positive");
  return -upper_incomplete_gamma(0.0, x);
}

/// Digamma psi(x) for x > 0.
inline double digamma(double x) {
  detail::require(x > 0.0 && std::isfinite(x), "digamma", "argument must be positive");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli tail: B2k / (2k x^{2k}), k = 1..7
  const double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))));
  return result + std::log(x) - 0.5 * inv - tail;
}

/// Trigamma psi'(x) for x > 0.
inline double trigamma(double x) {
  detail::require(x > 0.0 && std::isfinite(x), "trigamma", "argument must be positive");
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // 1/x + 1/(2x^2) + sum B2k / x^{2k+1}
  const double tail =
      inv * inv2 *
      (1.0 / 6 -
       inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66 - inv2 * 691.0 / 2730)))));
  return result + inv + 0.5 * inv2 + tail;
}

/// psi^{(order)}(x) for order 0 (digamma) or 1 (trigamma).
inline double polygamma(int order, double x) {
  detail::require(order == 0 || order == 1, "polygamma", "only orders 0 and 1 are supported");
  return order == 0 ? digamma(x) : trigamma(x);
}

/// Standard normal cdf.
inline double std_normal_cdf(double z) {
  detail::require(!std::isnan(z), "std_normal_cdf", "argument is NaN");
  return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

/// log(1 - Phi(z)), accurate far into the upper tail.
inline double log_std_normal_sf(double z) {
  detail::require(!std::isnan(z), "log_std_normal_sf", "argument is NaN");
  if (z < 30.0) return std::log(0.5 * std::erfc(z * std::numbers::sqrt2 / 2.0));
  // Mills-ratio asymptotic series
  const double inv2 = 1.0 / (z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2;
    sum += term;
  }
  return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(sum);
}

}  // namespace gll::special
