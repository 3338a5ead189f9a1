#pragma once

// Density, distribution function, moments, mode, quantile and entropy of the
// generalized Log-Lindley distribution LL_p(theta, lambda) on (0, 1).
//
// Most routines work in t = -log x, where T = -log X has the gamma-mixture density
//   c t^p (lambda + t) e^{-theta t},  c = theta^{2+p} / (Gamma(1+p) (1+p+lambda theta)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gll/errors.hpp"
#include "gll/params.hpp"
#include "gll/quadrature.hpp"
#include "gll/special_functions.hpp"

namespace gll {

namespace detail {

inline void require_unit_open(double x, const char* fn) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error(std::string(fn) + ": x must lie in (0, 1)");
}

inline void require_unit_closed(double x, const char* fn) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error(std::string(fn) + ": x must lie in [0, 1]");
}

inline double norm_a(const GllParams& g) { return 1.0 + g.p + g.lambda * g.theta; }

/// log of theta^{2+p} / (Gamma(1+p) (1+p+lambda theta)).
inline double log_norm(const GllParams& g) {
  return (2.0 + g.p) * std::log(g.theta) - std::lgamma(1.0 + g.p) - std::log(norm_a(g));
}

/// log density of T = -log X at t >= 0.
inline double log_density_t(const GllParams& g, double t) {
  const double power = g.p == 0.0 ? 0.0 : g.p * std::log(t);
  return log_norm(g) + power + std::log(g.lambda + t) - g.theta * t;
}

/// log f_X(e^{-t}) = log f_T(t) + t.
inline double log_pdf_t(const GllParams& g, double t) { return log_density_t(g, t) + t; }

/// Natural length scale of T, used to seed half-line quadrature.
inline double t_scale(const GllParams& g) {
  return (1.0 + g.p) * (g.lambda * g.theta + g.p + 2.0) / (g.theta * norm_a(g));
}

inline quad::Tolerance unit_tolerance() { return {1e-13, 1e-13, 4000}; }

}  // namespace detail

inline double log_pdf(const GllParams& g, double x) {
  validate(g);
  detail::require_unit_open(x, "log_pdf");
  return detail::log_pdf_t(g, -std::log(x));
}

inline double pdf(const GllParams& g, double x) { return std::exp(log_pdf(g, x)); }

/// Finite-sum cdf for integral p:
///   F = x^theta [ sum_{k=0}^{p} y^k/k! + y^{1+p} / (p! (1+p+lambda theta)) ],  y = -theta log x.
inline double cdf_integer(const GllParams& g, double x) {
  validate(g);
  detail::require_unit_closed(x, "cdf_integer");
  if (!integral_p(g.p)) throw unsupported_parameters("cdf_integer: p must be integral");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const int p = static_cast<int>(std::lround(g.p));
  const double y = -g.theta * std::log(x);
  const double log_y = std::log(y);
  double sum = 0.0;
  for (int k = 0; k <= p; ++k) sum += std::exp(-y + k * log_y - std::lgamma(k + 1.0));
  sum += std::exp(-y + (p + 1) * log_y - std::lgamma(p + 1.0)) / detail::norm_a(g);
  return std::min(sum, 1.0);
}

/// Incomplete-gamma cdf valid for every p >= 0:
///   F = [lambda theta Q(1+p, y) + (1+p) Q(2+p, y)] / (1+p+lambda theta).
inline double cdf_gamma(const GllParams& g, double x) {
  validate(g);
  detail::require_unit_closed(x, "cdf_gamma");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double y = -g.theta * std::log(x);
  const double a = detail::norm_a(g);
  const double q1 = g.lambda > 0.0 ? special::gamma_q(1.0 + g.p, y) : 0.0;
  return (g.lambda * g.theta * q1 + (1.0 + g.p) * special::gamma_q(2.0 + g.p, y)) / a;
}

/// The generalized-exponential-integral form of the cdf,
///   F = [x^theta + A Ei(-p, y)] y^{1+p} / (Gamma(1+p) A).
inline double cdf_ei(const GllParams& g, double x) {
  validate(g);
  detail::require_unit_closed(x, "cdf_ei");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double y = -g.theta * std::log(x);
  const double a = detail::norm_a(g);
  return (std::pow(x, g.theta) + a * special::gen_exp_integral(-g.p, y)) *
         std::exp((1.0 + g.p) * std::log(y) - std::lgamma(1.0 + g.p)) / a;
}

inline double cdf(const GllParams& g, double x) {
  return integral_p(g.p) ? cdf_integer(g, x) : cdf_gamma(g, x);
}

/// 1 - F without cancellation: [lambda theta P(1+p, y) + (1+p) P(2+p, y)] / A.
inline double survival(const GllParams& g, double x) {
  validate(g);
  detail::require_unit_closed(x, "survival");
  if (x == 0.0) return 1.0;
  if (x == 1.0) return 0.0;
  const double y = -g.theta * std::log(x);
  const double p1 = g.lambda > 0.0 ? special::gamma_p(1.0 + g.p, y) : 0.0;
  return (g.lambda * g.theta * p1 + (1.0 + g.p) * special::gamma_p(2.0 + g.p, y)) / detail::norm_a(g);
}

/// Survival in the displayed form
///   S = [A {Gamma(1+p) - y^{1+p} Ei(-p, y)} - x^theta y^{1+p}] / (Gamma(1+p) A).
inline double survival_ei(const GllParams& g, double x) {
  validate(g);
  detail::require_unit_closed(x, "survival_ei");
  if (x == 0.0) return 1.0;
  if (x == 1.0) return 0.0;
  const double y = -g.theta * std::log(x);
  const double a = detail::norm_a(g);
  const double y1p = std::pow(y, 1.0 + g.p);
  const double gp = std::tgamma(1.0 + g.p);
  return (a * (gp - y1p * special::gen_exp_integral(-g.p, y)) - std::pow(x, g.theta) * y1p) / (gp * a);
}

inline double hazard(const GllParams& g, double x) {
  validate(g);
  detail::require_unit_open(x, "hazard");
  const double s = survival(g, x);
  if (!(s > 0.0)) throw std::overflow_error("hazard: survival underflows to 0 near x = 1");
  const double r = std::exp(log_pdf(g, x) - std::log(s));
  if (!std::isfinite(r)) throw std::overflow_error("hazard: value overflows");
  return r;
}

/// Hazard as the displayed ratio built on survival_ei.
inline double hazard_ei(const GllParams& g, double x) {
  validate(g);
  detail::require_unit_open(x, "hazard_ei");
  const double y = -g.theta * std::log(x);
  const double a = detail::norm_a(g);
  const double y1p = std::pow(y, 1.0 + g.p);
  const double num = g.theta * g.theta * std::pow(y, g.p) * (g.lambda - std::log(x)) * std::pow(x, g.theta - 1.0);
  const double den = a * (std::tgamma(1.0 + g.p) - y1p * special::gen_exp_integral(-g.p, y)) - std::pow(x, g.theta) * y1p;
  return num / den;
}

/// E[X^r] for r + theta > 0.
inline double moment(const GllParams& g, double r) {
  validate(g);
  const double s = r + g.theta;
  if (!(s > 0.0)) throw std::domain_error("moment: requires r + theta > 0");
  return std::exp((2.0 + g.p) * std::log(g.theta / s)) * (s * g.lambda + 1.0 + g.p) / detail::norm_a(g);
}

inline double mean(const GllParams& g) {
  validate(g);
  const double ratio = g.theta / (1.0 + g.theta);
  return std::pow(ratio, 2.0 + g.p) * (1.0 + g.p + g.lambda * (1.0 + g.theta)) / detail::norm_a(g);
}

inline double variance(const GllParams& g) {
  const double m = mean(g);
  return moment(g, 2.0) - m * m;
}

/// E[(-log X)^r] = (p+1)(p+2)...(p+r) (1+r+p+lambda theta) / (theta^r (1+p+lambda theta)), integer r >= 1.
inline double neg_log_moment(const GllParams& g, double r) {
  validate(g);
  if (!(r >= 1.0) || r != std::floor(r)) throw std::domain_error("neg_log_moment: r must be an integer >= 1");
  double rising = 1.0;
  for (int k = 1; k <= static_cast<int>(r); ++k) rising *= g.p + k;
  return rising * (1.0 + r + g.p + g.lambda * g.theta) / (std::pow(g.theta, r) * detail::norm_a(g));
}

/// E[X^r log X] for r + theta > 0.
inline double x_r_log_moment(const GllParams& g, double r) {
  validate(g);
  const double s = r + g.theta;
  if (!(s > 0.0)) throw std::domain_error("x_r_log_moment: requires r + theta > 0");
  return -std::exp((g.p + 3.0) * std::log(g.theta / s)) * (g.p + 1.0) * (2.0 + g.p + g.lambda * s) /
         (g.theta * detail::norm_a(g));
}

/// E[(-log X)^p] under LL(theta, lambda), the normalizer of the weight (-log x)^p.
inline double weight_expectation(double theta, double lambda, double p) {
  validate(GllParams{theta, lambda, p});
  return std::exp(std::lgamma(1.0 + p) - p * std::log(theta)) * (1.0 + p + lambda * theta) /
         (1.0 + lambda * theta);
}

/// Density of the (theta, pi, p) form.
inline double pdf_pi(const PiParams& pp, double x) {
  validate(pp);
  detail::require_unit_open(x, "pdf_pi");
  const double t = -std::log(x);
  const double log_c = (1.0 + pp.p) * std::log(pp.theta) - std::lgamma(1.0 + pp.p) - std::log1p((1.0 - pp.pi) * pp.p);
  const double power = pp.p == 0.0 ? 0.0 : pp.p * std::log(t);
  return std::exp(log_c + power + (pp.theta - 1.0) * std::log(x)) * (pp.pi + pp.theta * (1.0 - pp.pi) * t);
}

/// Inverse of from_mean: mu = mean, gamma = ((1+theta)/theta)^p, phi = lambda (1+theta)/(1+p).
inline MeanParams to_mean(const GllParams& g) {
  validate(g);
  return {mean(g), g.lambda * (1.0 + g.theta) / (1.0 + g.p), std::exp(g.p * std::log1p(1.0 / g.theta))};
}

// ---------------------------------------------------------------------------
// Mode

enum class ModeKind { interior, at_zero, at_one };

struct Mode {
  double location = 0.0;
  ModeKind kind = ModeKind::interior;
};

/// Stationary points of log f in t solve (theta-1) t^2 + ((theta-1) lambda - p - 1) t - p lambda = 0.
/// theta <= 1: density decreasing in x, mode at 0+.
inline Mode mode(const GllParams& g) {
  validate(g);
  if (g.theta <= 1.0) return {0.0, ModeKind::at_zero};
  const double a = g.theta - 1.0;
  const double b = a * g.lambda - g.p - 1.0;
  const double c = -g.p * g.lambda;
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  const double t = b < 0.0 ? (-b + disc) / (2.0 * a) : (-2.0 * c) / (b + disc);
  if (!(t > 0.0)) return {1.0, ModeKind::at_one};
  return {std::exp(-t), ModeKind::interior};
}

// ---------------------------------------------------------------------------
// Quantile

inline double quantile(const GllParams& g, double u) {
  validate(g);
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0, 1)");
  // Solve in t = -log x; F(e^{-t}) decreases in t. Upper quantiles use the survival.
  const bool upper = u > 0.5;
  auto residual = [&](double t) {
    const double x = std::exp(-t);
    return upper ? (1.0 - u) - survival(g, x) : cdf(g, x) - u;
  };
  // residual is decreasing in t for both branches.
  double lo = 0.0;
  double hi = std::max(detail::t_scale(g), 1e-3);
  while (residual(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw convergence_error("quantile: could not bracket");
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    const double r = residual(t);
    if (r == 0.0) return std::exp(-t);
    if (r > 0.0) lo = t; else hi = t;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return std::exp(-t);
    // both residuals have derivative -f_T(t)
    const double dens = std::exp(detail::log_density_t(g, t));
    double next = dens > 0.0 ? t + r / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) <= 1e-15 * std::max(1.0, t)) return std::exp(-next);
    t = next;
  }
  throw convergence_error("quantile: iteration cap reached");
}

// ---------------------------------------------------------------------------
// Entropy and divergence

/// -int f log f dx by quadrature in t = -log x.
inline double entropy_numeric(const GllParams& g) {
  validate(g);
  auto integrand = [&](double t) {
    const double lf = detail::log_density_t(g, t);
    if (!std::isfinite(lf)) return 0.0;
    return -std::exp(lf) * (lf + t);
  };
  return quad::integrate_half_line(integrand, detail::t_scale(g), detail::unit_tolerance(), true).value;
}

/// -int w f log f dx with w(x) = (-log x)^k.
inline double weighted_entropy(const GllParams& g, double weight_exponent) {
  validate(g);
  if (!(weight_exponent >= 0.0)) throw std::domain_error("weighted_entropy: weight exponent must be >= 0");
  auto integrand = [&](double t) {
    const double lf = detail::log_density_t(g, t);
    if (!std::isfinite(lf)) return 0.0;
    const double w = weight_exponent == 0.0 ? 1.0 : std::pow(t, weight_exponent);
    return -w * std::exp(lf) * (lf + t);
  };
  return quad::integrate_half_line(integrand, detail::t_scale(g), detail::unit_tolerance(), true).value;
}

inline double kl_divergence(const GllParams& g1, const GllParams& g2) {
  validate(g1);
  validate(g2);
  auto integrand = [&](double t) {
    const double l1 = detail::log_density_t(g1, t);
    if (!std::isfinite(l1)) return 0.0;
    const double l2 = detail::log_density_t(g2, t);
    if (!std::isfinite(l2)) throw std::domain_error("kl_divergence: second density vanishes where the first does not");
    return std::exp(l1) * (l1 - l2);
  };
  const double value =
      quad::integrate_half_line(integrand, detail::t_scale(g1), detail::unit_tolerance(), true).value;
  return std::max(value, 0.0);
}

namespace detail {

/// J(m) = int_lambda^inf s^m log s e^{-theta s} ds by upward recurrence from J(0).
inline std::vector<double> log_power_integrals(double lambda, double theta, int m_max) {
  const double z = lambda * theta;
  const double ez = std::exp(-z);
  const double log_l = std::log(lambda);
  std::vector<double> j(m_max + 1);
  j[0] = (log_l * ez + special::upper_incomplete_gamma(0.0, z)) / theta;
  for (int m = 1; m <= m_max; ++m) {
    j[m] = (std::pow(lambda, m) * log_l * ez + m * j[m - 1] +
            std::pow(theta, -m) * special::upper_incomplete_gamma(m, z)) /
           theta;
  }
  return j;
}

inline double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace detail

/// E[log T] with T = -log X.
inline double expected_log_t(const GllParams& g) {
  validate(g);
  const double a = detail::norm_a(g);
  const double lt = std::log(g.theta);
  return (g.lambda * g.theta * (special::digamma(1.0 + g.p) - lt) +
          (1.0 + g.p) * (special::digamma(2.0 + g.p) - lt)) /
         a;
}

/// E[log(lambda + T)] for integral p and lambda > 0.
inline double expected_log_lambda_t(const GllParams& g) {
  validate(g);
  if (!integral_p(g.p)) throw unsupported_parameters("expected_log_lambda_t: p must be integral");
  if (!(g.lambda > 0.0)) throw unsupported_parameters("expected_log_lambda_t: lambda must be positive");
  const int p = static_cast<int>(std::lround(g.p));
  const auto j = detail::log_power_integrals(g.lambda, g.theta, p + 1);
  double sum = 0.0;
  for (int r = 0; r <= p; ++r) sum += detail::binomial(p, r) * std::pow(-g.lambda, p - r) * j[r + 1];
  return std::exp(detail::log_norm(g) + g.lambda * g.theta) * sum;
}

/// Closed-form entropy for integral p and lambda > 0:
///   H = -log c - p E[log T] - E[log(lambda + T)] + (theta - 1) E[T].
inline double entropy_closed_value(const GllParams& g) {
  validate(g);
  if (!integral_p(g.p) || !(g.lambda > 0.0)) {
    throw unsupported_parameters("entropy_closed: needs integral p and lambda > 0; use entropy_numeric");
  }
  return -detail::log_norm(g) - g.p * expected_log_t(g) - expected_log_lambda_t(g) +
         (g.theta - 1.0) * neg_log_moment(g, 1.0);
}

struct EntropyReport {
  double value = 0.0;       // authoritative value (quadrature on disagreement)
  double closed = 0.0;
  double numeric = 0.0;
  bool discrepancy = false;
  std::string diagnostic;   // empty when closed and numeric agree
};

inline constexpr double entropy_agreement = 1e-6;

/// Closed-form entropy for p in {0, 1, 2}, cross-checked against quadrature.
inline EntropyReport entropy_closed(const GllParams& g) {
  validate(g);
  if (!(integral_p(g.p) && g.p <= 2.0 + 1e-9)) {
    throw unsupported_parameters("entropy_closed: p must be 0, 1 or 2; use entropy_numeric");
  }
  if (!(g.lambda > 0.0)) throw unsupported_parameters("entropy_closed: lambda must be positive; use entropy_numeric");
  EntropyReport rep;
  rep.closed = entropy_closed_value(g);
  rep.numeric = entropy_numeric(g);
  rep.discrepancy = !(std::fabs(rep.closed - rep.numeric) <= entropy_agreement);
  rep.value = rep.discrepancy ? rep.numeric : rep.closed;
  if (rep.discrepancy) rep.diagnostic = "closed_form_discrepancy: entropy " + describe(g);
  return rep;
}

// Entropy expressions in the form originally displayed for p = 0, 1, 2. They
// are kept as diagnostics; entropy_closed does not use them.
struct PrintedEntropy {
  double value = 0.0;
  double log_log_term = 0.0;  // E[log log(1/X)] as displayed (p >= 1)
  double second_term = 0.0;   // E[log{(lambda - log X) X^{theta-1}}] as displayed
};

inline PrintedEntropy entropy_printed(const GllParams& g) {
  validate(g);
  if (!(integral_p(g.p) && g.p <= 2.0 + 1e-9) || !(g.lambda > 0.0)) {
    throw unsupported_parameters("entropy_printed: p must be 0, 1 or 2 and lambda > 0");
  }
  const double th = g.theta;
  const double l = g.lambda;
  const double z = l * th;
  const double eei = std::exp(z) * special::exp_integral_neg(z);
  const double ge = special::euler_gamma;
  PrintedEntropy pe;
  const int p = static_cast<int>(std::lround(g.p));
  if (p == 0) {
    pe.value = (th * (1.0 - l) * (1.0 - th) + th * eei - th * (1.0 + z) * std::log(l * th * th / (1.0 + z)) - 2.0) /
               (th * (1.0 + z));
    return pe;
  }
  if (p == 1) {
    pe.log_log_term = (3.0 + z - (2.0 + z) * (ge + std::log(th))) / (2.0 + z);
    pe.second_term =
        (6.0 - 3.0 * th + 2.0 * z * (1.0 - th) - (2.0 - z) * eei + th * (2.0 + z) * std::log(l)) / (th * (2.0 + z));
    pe.value = std::log((2.0 + z) / ((1.0 + z) * th * th)) - pe.log_log_term - pe.second_term;
    return pe;
  }
  pe.log_log_term = (11.0 + 3.0 * z - 2.0 * (3.0 + z) * (ge + std::log(th))) / (6.0 + 2.0 * z);
  pe.second_term = (24.0 - th * (13.0 - 6.0 * l + 7.0 * z) - th * (6.0 + z * (z - 4.0)) * eei +
                    2.0 * th * (3.0 + z) * std::log(l)) /
                   (th * (6.0 + 2.0 * z));
  pe.value = -detail::log_norm(g) - 2.0 * pe.log_log_term - pe.second_term;
  return pe;
}

}  // namespace gll
