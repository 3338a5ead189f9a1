#pragma once

// Grid checks of the structural properties: likelihood-ratio order, moment and
// hazard ordering, log-concavity, cdf shape and the dominance F(x) >= x^theta.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gll/distribution.hpp"
#include "gll/params.hpp"

namespace gll {

enum class Verdict { pass, fail, outside_regime };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::outside_regime: return "outside_regime";
  }
  return "?";
}

struct Violation {
  double x;
  double lhs;
  double rhs;
};

struct GridReport {
  std::string check;
  std::vector<double> grid;
  Verdict verdict = Verdict::pass;
  std::optional<Violation> first_violation;
  std::string message;
};

/// Points on (1e-8, 1 - 1e-8), log-spaced towards both endpoints.
inline std::vector<double> analysis_grid(std::size_t size = 2048) {
  if (size < 4) size = 4;
  const std::size_t half = size / 2;
  const double lo = std::log(1e-8), hi = std::log(0.5);
  std::vector<double> g;
  g.reserve(size);
  for (std::size_t i = 0; i < half; ++i) g.push_back(std::exp(lo + (hi - lo) * i / (half - 1)));
  const std::size_t rest = size - half;
  for (std::size_t i = 0; i < rest; ++i) {
    // mirror: distance to 1 log-spaced from just below 0.5 down to 1e-8
    const double d = std::exp(hi + (lo - hi) * (i + 1) / rest);
    g.push_back(1.0 - d);
  }
  return g;
}

namespace detail {

inline GridReport make_report(const std::string& check, std::size_t grid_size) {
  GridReport r;
  r.check = check;
  r.grid = analysis_grid(grid_size);
  return r;
}

inline void record(GridReport& r, double x, double lhs, double rhs) {
  if (!r.first_violation) r.first_violation = Violation{x, lhs, rhs};
  r.verdict = Verdict::fail;
}

inline bool lr_hypothesis(const GllParams& a, const GllParams& b) {
  return a.theta <= b.theta && a.lambda <= b.lambda && b.p <= a.p;
}

// d/dx log f = g / x with g = (theta-1) - p/t - 1/(lambda+t), t = -log x
inline double slope_bracket(const GllParams& g, double t) {
  return (g.theta - 1.0) - g.p / t - 1.0 / (g.lambda + t);
}

}  // namespace detail

/// f(x; p2) / f(x; p1) non-decreasing on the grid, when theta1 <= theta2, lambda1 <= lambda2, p2 <= p1.
inline GridReport lr_ratio_monotone(const GllParams& p1, const GllParams& p2, std::size_t grid_size = 2048) {
  validate(p1);
  validate(p2);
  auto r = detail::make_report("lr_ratio_monotone", grid_size);
  if (!detail::lr_hypothesis(p1, p2)) {
    r.verdict = Verdict::outside_regime;
    r.message = "hypothesis not satisfied: need theta1 <= theta2, lambda1 <= lambda2, p2 <= p1";
    return r;
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (double x : r.grid) {
    const double lr = log_pdf(p2, x) - log_pdf(p1, x);
    if (lr < prev - 1e-12 * std::max(1.0, std::fabs(prev))) detail::record(r, x, lr, prev);
    prev = std::max(prev, lr);
  }
  r.message = r.verdict == Verdict::pass ? "log density ratio non-decreasing" : "log density ratio decreases";
  return r;
}

/// Under the likelihood-ratio hypothesis: E[X1^k] <= E[X2^k] for k in {0.5, 1, 2, 3} and hazards r1 >= r2.
inline GridReport moment_hazard_ordering(const GllParams& p1, const GllParams& p2, std::size_t grid_size = 2048) {
  validate(p1);
  validate(p2);
  auto r = detail::make_report("moment_hazard_ordering", grid_size);
  if (!detail::lr_hypothesis(p1, p2)) {
    r.verdict = Verdict::outside_regime;
    r.message = "hypothesis not satisfied: need theta1 <= theta2, lambda1 <= lambda2, p2 <= p1";
    return r;
  }
  std::ostringstream msg;
  for (double k : {0.5, 1.0, 2.0, 3.0}) {
    const double m1 = moment(p1, k), m2 = moment(p2, k);
    if (m1 > m2 * (1.0 + 1e-12)) {
      detail::record(r, k, m1, m2);
      msg << "moment order " << k << " violated; ";
    }
  }
  for (double x : r.grid) {
    const double s1 = survival(p1, x), s2 = survival(p2, x);
    if (!(s1 > 0.0 && s2 > 0.0)) continue;
    const double l1 = log_pdf(p1, x) - std::log(s1);
    const double l2 = log_pdf(p2, x) - std::log(s2);
    if (l1 < l2 - 1e-9) {
      detail::record(r, x, std::exp(l1), std::exp(l2));
      msg << "hazard order violated; ";
      break;
    }
  }
  r.message = r.verdict == Verdict::pass ? "moments increase and hazards decrease from X1 to X2" : msg.str();
  return r;
}

struct LogConcavityReport {
  GridReport exact;    // sign of the exact (log f)''
  GridReport printed;  // monotonicity of the displayed f'/f expression
};

/// For theta > 1: (log f)'' <= 0 on the grid. (log f)'' = -x^{-2} B(t) with
/// B = (theta-1) - p/t + p/t^2 - 1/(lambda+t) + 1/(lambda+t)^2.
inline LogConcavityReport log_concavity_check(const GllParams& g, std::size_t grid_size = 2048) {
  validate(g);
  LogConcavityReport out{detail::make_report("log_concavity", grid_size),
                         detail::make_report("log_concavity_printed", grid_size)};
  if (!(g.theta > 1.0)) {
    for (auto* r : {&out.exact, &out.printed}) {
      r->verdict = Verdict::outside_regime;
      r->message = "outside log-concavity regime (theta <= 1)";
    }
    return out;
  }
  for (double x : out.exact.grid) {
    const double t = -std::log(x);
    const double u = 1.0 / (g.lambda + t);
    const double b = (g.theta - 1.0) - g.p / t + g.p / (t * t) - u + u * u;
    if (b < -1e-12) {
      detail::record(out.exact, x, -b / (x * x), 0.0);
      break;
    }
  }
  out.exact.message = out.exact.verdict == Verdict::pass ? "(log f)'' <= 0 on the grid" : "(log f)'' > 0 somewhere";

  // displayed ratio (theta-1){t - (lambda - (p+1)/(theta-1)) - (p lambda/(theta-1))/t}, must decrease in x
  const double tm = g.theta - 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double x : out.printed.grid) {
    const double t = -std::log(x);
    const double v = tm * (t - (g.lambda - (g.p + 1.0) / tm) - (g.p * g.lambda / tm) / t);
    if (v > prev + 1e-12 * std::max(1.0, std::fabs(prev))) {
      detail::record(out.printed, x, v, prev);
      break;
    }
    prev = v;
  }
  out.printed.message = out.printed.verdict == Verdict::pass ? "displayed ratio decreasing" : "displayed ratio increases";
  return out;
}

enum class CdfShape { concave, convex, neither };

inline const char* to_string(CdfShape s) {
  switch (s) {
    case CdfShape::concave: return "concave";
    case CdfShape::convex: return "convex";
    case CdfShape::neither: return "neither";
  }
  return "?";
}

struct CdfShapeReport {
  CdfShape shape = CdfShape::neither;
  std::optional<CdfShape> predicted;  // empty where no shape is predicted
  GridReport report;
};

/// Sign scan of F'' = f(x) g(t) / x on the grid and comparison with the predicted shape:
/// concave for theta <= 1, neither for theta > 1 with p > 0 and lambda > 0,
/// convex for p = 0 with lambda (theta - 1) >= 1.
inline CdfShapeReport cdf_shape_classify(const GllParams& g, std::size_t grid_size = 2048) {
  validate(g);
  CdfShapeReport out;
  out.report = detail::make_report("cdf_shape", grid_size);
  bool any_pos = false, any_neg = false;
  double pos_x = 0.0, neg_x = 0.0;
  for (double x : out.report.grid) {
    const double s = detail::slope_bracket(g, -std::log(x));
    if (s > 1e-14 && !any_pos) {
      any_pos = true;
      pos_x = x;
    }
    if (s < -1e-14 && !any_neg) {
      any_neg = true;
      neg_x = x;
    }
  }
  out.shape = any_pos && any_neg ? CdfShape::neither : (any_pos ? CdfShape::convex : CdfShape::concave);
  if (g.theta <= 1.0) {
    out.predicted = CdfShape::concave;
  } else if (g.p > 0.0 && g.lambda > 0.0) {
    out.predicted = CdfShape::neither;
  } else if (g.p == 0.0 && g.lambda * (g.theta - 1.0) >= 1.0) {
    out.predicted = CdfShape::convex;
  }
  if (!out.predicted) {
    out.report.verdict = Verdict::outside_regime;
    out.report.message = std::string("no shape prediction for these parameters; observed ") + to_string(out.shape);
    return out;
  }
  if (out.shape != *out.predicted) {
    const double x = *out.predicted == CdfShape::concave ? pos_x : neg_x;
    detail::record(out.report, x, detail::slope_bracket(g, -std::log(x)), 0.0);
  }
  out.report.message = std::string("observed ") + to_string(out.shape) + ", predicted " + to_string(*out.predicted);
  return out;
}

/// F(x) >= x^theta on the grid.
inline GridReport dominance_check(const GllParams& g, std::size_t grid_size = 2048) {
  validate(g);
  auto r = detail::make_report("dominance", grid_size);
  for (double x : r.grid) {
    const double f = cdf(g, x);
    const double b = std::pow(x, g.theta);
    if (f < b * (1.0 - 1e-12)) {
      detail::record(r, x, f, b);
      break;
    }
  }
  r.message = r.verdict == Verdict::pass ? "F(x) >= x^theta on the grid" : "F(x) < x^theta somewhere";
  return r;
}

}  // namespace gll
