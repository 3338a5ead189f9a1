#pragma once

// Proportional-hazard and GLL-distorted premiums for exponential, Weibull and
// inverse-Gaussian risks.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gll/errors.hpp"
#include "gll/params.hpp"
#include "gll/quadrature.hpp"
#include "gll/special_functions.hpp"

namespace gll {

enum class RiskKind { exponential, weibull, inverse_gaussian };

/// exponential(rate), weibull(shape, scale), inverse_gaussian(mean, shape).
struct RiskModel {
  RiskKind kind = RiskKind::exponential;
  double a = 1.0;
  double b = 0.0;

  static RiskModel exponential(double rate) { return checked({RiskKind::exponential, rate, 0.0}); }
  static RiskModel weibull(double shape, double scale) { return checked({RiskKind::weibull, shape, scale}); }
  static RiskModel inverse_gaussian(double mean, double shape) {
    return checked({RiskKind::inverse_gaussian, mean, shape});
  }

  std::string label() const {
    std::ostringstream os;
    switch (kind) {
      case RiskKind::exponential: os << "exponential(rate=" << a << ")"; break;
      case RiskKind::weibull: os << "weibull(shape=" << a << ",scale=" << b << ")"; break;
      case RiskKind::inverse_gaussian: os << "inverse_gaussian(mean=" << a << ",shape=" << b << ")"; break;
    }
    return os.str();
  }

 private:
  static RiskModel checked(RiskModel m) {
    const bool ok = std::isfinite(m.a) && m.a > 0.0 && (m.kind == RiskKind::exponential || (std::isfinite(m.b) && m.b > 0.0));
    if (!ok) throw invalid_parameters("risk model parameters must be finite and positive");
    return m;
  }
};

/// -log of the risk survival at x >= 0.
inline double risk_cumulative_hazard(const RiskModel& m, double x) {
  if (!(x >= 0.0)) throw std::domain_error("risk_survival: x must be >= 0");
  if (x == 0.0) return 0.0;
  switch (m.kind) {
    case RiskKind::exponential: return m.a * x;
    case RiskKind::weibull: return std::pow(x / m.b, m.a);
    case RiskKind::inverse_gaussian: {
      // S = Phi(-r(x/mu - 1)) - e^{2 s / mu} Phi(-r(x/mu + 1)), r = sqrt(s / x), kept in logs
      const double mu = m.a, s = m.b;
      const double r = std::sqrt(s / x);
      const double l1 = special::log_std_normal_sf(r * (x / mu - 1.0));
      const double l2 = 2.0 * s / mu + special::log_std_normal_sf(r * (x / mu + 1.0));
      const double diff = l2 - l1;
      if (!(diff < 0.0)) return std::numeric_limits<double>::infinity();
      return -(l1 + std::log(-std::expm1(diff)));
    }
  }
  return 0.0;
}

inline double risk_survival(const RiskModel& m, double x) { return std::exp(-risk_cumulative_hazard(m, x)); }

inline double risk_mean(const RiskModel& m) {
  switch (m.kind) {
    case RiskKind::exponential: return 1.0 / m.a;
    case RiskKind::weibull: return m.b * std::tgamma(1.0 + 1.0 / m.a);
    case RiskKind::inverse_gaussian: return m.a;
  }
  return 0.0;
}

/// GLL cdf at u = e^{-h}, evaluated from h to keep precision when u is tiny or near 1.
inline double gll_distortion_from_hazard(const GllParams& g, double h) {
  if (h <= 0.0) return 1.0;
  if (!std::isfinite(h)) return 0.0;
  const double y = g.theta * h;
  const double a = 1.0 + g.p + g.lambda * g.theta;
  return (g.lambda * g.theta * special::gamma_q(1.0 + g.p, y) + (1.0 + g.p) * special::gamma_q(2.0 + g.p, y)) / a;
}

inline double gll_distortion(const GllParams& g, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("gll_distortion: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  return gll_distortion_from_hazard(g, -std::log(u));
}

namespace detail {

inline quad::Tolerance premium_tolerance() { return {1e-9, 1e-11, 4000}; }

}  // namespace detail

/// Integral over x >= 0 of D(H(x)), where H is a cumulative hazard and D maps it to [0, 1].
inline double premium_integral(const std::function<double(double)>& cumulative_hazard,
                               const std::function<double(double)>& distortion, double scale) {
  auto f = [&](double x) { return distortion(cumulative_hazard(x)); };
  return quad::integrate_half_line(f, scale, detail::premium_tolerance()).value;
}

inline void validate_ph_exponent(double n) {
  if (!(n > 0.0 && n <= 1.0)) throw invalid_parameters("proportional hazard exponent must lie in (0, 1]");
}

/// Integral of S(x)^n by quadrature for any risk.
inline double ph_premium_numeric(const RiskModel& m, double n) {
  validate_ph_exponent(n);
  return premium_integral([&](double x) { return risk_cumulative_hazard(m, x); },
                          [n](double h) { return std::exp(-n * h); }, risk_mean(m));
}

/// Proportional hazard premium: closed form for exponential and Weibull risks.
inline double ph_premium(const RiskModel& m, double n) {
  validate_ph_exponent(n);
  switch (m.kind) {
    case RiskKind::exponential: return 1.0 / (n * m.a);
    case RiskKind::weibull: return m.b * std::pow(n, -1.0 / m.a) * std::tgamma(1.0 + 1.0 / m.a);
    case RiskKind::inverse_gaussian: return ph_premium_numeric(m, n);
  }
  return 0.0;
}

inline void validate_distortion(const GllParams& g) {
  validate(g);
  if (g.theta > 1.0) throw unsupported_parameters("distorted premium requires 0 < theta <= 1 (concave distortion)");
}

/// Integral of F(S(x); theta, lambda, p) over x >= 0.
inline double distorted_premium(const RiskModel& m, const GllParams& g) {
  validate_distortion(g);
  return premium_integral([&](double x) { return risk_cumulative_hazard(m, x); },
                          [&](double h) { return gll_distortion_from_hazard(g, h); }, risk_mean(m));
}

// ---------------------------------------------------------------------------
// Tables

struct PremiumTable {
  std::vector<RiskModel> risks;
  std::vector<double> ph_exponents;
  std::vector<GllParams> specs;
  std::vector<std::vector<double>> ph;   // [risk][exponent]
  std::vector<std::vector<double>> gll;  // [risk][spec]
  std::vector<bool> bound_holds;         // per risk: P_n <= P_{theta,lambda} whenever n >= theta
};

inline bool premium_bound_holds(const std::vector<double>& exponents, const std::vector<GllParams>& specs,
                                const std::vector<double>& ph_row, const std::vector<double>& gll_row) {
  for (std::size_t i = 0; i < exponents.size(); ++i)
    for (std::size_t j = 0; j < specs.size(); ++j)
      if (exponents[i] >= specs[j].theta && ph_row[i] > gll_row[j]) return false;
  return true;
}

inline PremiumTable premium_table(const std::vector<RiskModel>& risks, const std::vector<double>& exponents,
                                  const std::vector<GllParams>& specs) {
  for (double n : exponents) validate_ph_exponent(n);
  for (const auto& g : specs) validate_distortion(g);
  PremiumTable t{risks, exponents, specs, {}, {}, {}};
  for (const auto& r : risks) {
    std::vector<double> ph_row, gll_row;
    for (double n : exponents) ph_row.push_back(ph_premium(r, n));
    for (const auto& g : specs) gll_row.push_back(distorted_premium(r, g));
    t.bound_holds.push_back(premium_bound_holds(exponents, specs, ph_row, gll_row));
    t.ph.push_back(std::move(ph_row));
    t.gll.push_back(std::move(gll_row));
  }
  return t;
}

inline std::vector<RiskModel> table1_risks() {
  return {RiskModel::exponential(0.5),          RiskModel::exponential(2.0),          RiskModel::weibull(0.5, 1.0),
          RiskModel::weibull(1.5, 0.5),         RiskModel::weibull(1.5, 1.5),         RiskModel::inverse_gaussian(0.5, 1.0),
          RiskModel::inverse_gaussian(2.5, 0.5), RiskModel::inverse_gaussian(2.0, 2.0)};
}

inline std::vector<double> table1_exponents() { return {0.4, 0.75, 1.0}; }

inline std::vector<GllParams> table1_specs() {
  std::vector<GllParams> out;
  for (double p : {1.0, 2.0})
    for (double theta : {0.3, 0.7})
      for (double lambda : {0.5, 1.5}) out.push_back({theta, lambda, p});
  return out;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Delimited text: one row per risk, P_n columns then distorted columns, then the bound flag.
inline std::string format_premium_table(const PremiumTable& t, char delim = '\t') {
  std::ostringstream os;
  os << "risk";
  for (double n : t.ph_exponents) os << delim << "P_n(n=" << n << ")";
  for (const auto& g : t.specs) os << delim << "P(theta=" << g.theta << ",lambda=" << g.lambda << ",p=" << g.p << ")";
  os << delim << "bound_ok\n";
  for (std::size_t i = 0; i < t.risks.size(); ++i) {
    os << t.risks[i].label();
    for (double v : t.ph[i]) os << delim << format_fixed(v, 3);
    for (double v : t.gll[i]) os << delim << format_fixed(v, 3);
    os << delim << (t.bound_holds[i] ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace gll
