#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "gll/errors.hpp"

namespace gll {

/// Canonical parameters of the generalized Log-Lindley distribution.
struct GllParams {
  double theta = 1.0;
  double lambda = 0.0;
  double p = 0.0;

  bool operator==(const GllParams&) const = default;
};

/// (theta, pi, p) with pi = lambda theta / (1 + lambda theta) in [0, 1].
struct PiParams {
  double theta = 1.0;
  double pi = 0.0;
  double p = 0.0;
};

/// Mean parameterization: mean mu, dispersion phi, shape link gamma.
struct MeanParams {
  double mu = 0.5;
  double phi = 1.0;
  double gamma = 1.0;
};

inline std::string describe(const GllParams& g) {
  std::ostringstream os;
  os.precision(17);
  os << "(theta=" << g.theta << ", lambda=" << g.lambda << ", p=" << g.p << ")";
  return os.str();
}

inline bool is_valid(const GllParams& g) {
  return std::isfinite(g.theta) && std::isfinite(g.lambda) && std::isfinite(g.p) && g.theta > 0.0 &&
         g.lambda >= 0.0 && g.p >= 0.0;
}

inline void validate(const GllParams& g) {
  if (!is_valid(g)) throw invalid_parameters("invalid GLL parameters " + describe(g));
}

inline void validate(const PiParams& pp) {
  if (!(std::isfinite(pp.theta) && pp.theta > 0.0 && pp.pi >= 0.0 && pp.pi <= 1.0 && std::isfinite(pp.p) &&
        pp.p >= 0.0)) {
    throw invalid_parameters("invalid pi parameters");
  }
}

inline void validate(const MeanParams& mp) {
  if (!(mp.mu > 0.0 && mp.mu < 1.0 && std::isfinite(mp.phi) && mp.phi > 0.0 && std::isfinite(mp.gamma) &&
        mp.gamma >= 1.0)) {
    throw invalid_parameters("invalid mean parameters: need 0 < mu < 1, phi > 0, gamma >= 1");
  }
  if (!(mp.mu * mp.gamma < 1.0)) throw boundary_error("mean parameters: mu * gamma must be < 1");
}

/// True when p is within 1e-9 of a non-negative integer.
inline bool integral_p(double p) { return std::fabs(p - std::round(p)) <= 1e-9; }

inline GllParams from_pi(const PiParams& pp) {
  validate(pp);
  if (pp.pi >= 1.0) throw boundary_error("pi = 1 corresponds to lambda = infinity");
  return {pp.theta, pp.pi / (pp.theta * (1.0 - pp.pi)), pp.p};
}

inline PiParams to_pi(const GllParams& g) {
  validate(g);
  const double lt = g.lambda * g.theta;
  return {g.theta, lt / (1.0 + lt), g.p};
}

/// theta solving theta^2 (1+phi)(1-m) - m (2+phi) theta - m = 0 with m = mu gamma.
inline double mean_theta(double m, double phi) {
  const double disc = m * m * phi * phi + 4.0 * m * (1.0 + phi);
  return (m * (2.0 + phi) + std::sqrt(disc)) / (2.0 * (1.0 - m) * (1.0 + phi));
}

inline GllParams from_mean(const MeanParams& mp) {
  validate(mp);
  const double m = mp.mu * mp.gamma;
  const double theta = mean_theta(m, mp.phi);
  if (!std::isfinite(theta)) throw boundary_error("mean parameters: theta diverges as mu * gamma -> 1");
  const double p = std::log(mp.gamma) / std::log1p(1.0 / theta);
  const double lambda = (1.0 + p) / (1.0 + theta) * mp.phi;
  return {theta, lambda, p};
}

}  // namespace gll
