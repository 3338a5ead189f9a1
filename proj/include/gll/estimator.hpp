#pragma once

// Maximum-likelihood estimation of GllParams: log-likelihood, analytic score
// and Hessian, Fisher information and a multi-start fitter with boundary
// sub-models for lambda = 0 and p = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gll/distribution.hpp"
#include "gll/errors.hpp"
#include "gll/optimize.hpp"
#include "gll/params.hpp"
#include "gll/quadrature.hpp"
#include "gll/special_functions.hpp"

namespace gll {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Observations strictly inside (0, 1), with t = -log x cached.
class Sample {
 public:
  explicit Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("sample: at least one observation is required");
    t_.reserve(values_.size());
    log_t_.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double x = values_[i];
      if (!(x > 0.0 && x < 1.0)) {
        throw std::domain_error("sample: observation " + std::to_string(i) + " = " + std::to_string(x) +
                                " is outside (0, 1)");
      }
      const double t = -std::log(x);
      t_.push_back(t);
      log_t_.push_back(std::log(t));
    }
    sum_t_ = std::accumulate(t_.begin(), t_.end(), 0.0);
    sum_log_t_ = std::accumulate(log_t_.begin(), log_t_.end(), 0.0);
  }

  std::size_t n() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& t() const noexcept { return t_; }
  double sum_t() const noexcept { return sum_t_; }
  double sum_log_t() const noexcept { return sum_log_t_; }

 private:
  std::vector<double> values_;
  std::vector<double> t_;
  std::vector<double> log_t_;
  double sum_t_ = 0.0;
  double sum_log_t_ = 0.0;
};

namespace detail {

struct LambdaSums {
  double log_sum = 0.0;  // sum log(lambda + t)
  double inv = 0.0;      // sum 1 / (lambda + t)
  double inv_sq = 0.0;   // sum 1 / (lambda + t)^2
};

inline LambdaSums lambda_sums(const Sample& s, double lambda, bool with_derivatives) {
  LambdaSums out;
  for (double t : s.t()) {
    const double u = lambda + t;
    out.log_sum += std::log(u);
    if (with_derivatives) {
      out.inv += 1.0 / u;
      out.inv_sq += 1.0 / (u * u);
    }
  }
  return out;
}

inline double loglik_from(const GllParams& g, const Sample& s, double log_lambda_sum) {
  const double n = static_cast<double>(s.n());
  const double a = norm_a(g);
  const double power = g.p == 0.0 ? 0.0 : g.p * s.sum_log_t();
  return n * ((2.0 + g.p) * std::log(g.theta) - std::lgamma(1.0 + g.p) - std::log(a)) + power + log_lambda_sum -
         (g.theta - 1.0) * s.sum_t();
}

inline Vector3 score_from(const GllParams& g, const Sample& s, const LambdaSums& ls) {
  const double n = static_cast<double>(s.n());
  const double a = norm_a(g);
  Vector3 u;
  u(0) = n * (2.0 + g.p) / g.theta - n * g.lambda / a - s.sum_t();
  u(1) = -n * g.theta / a + ls.inv;
  u(2) = n * std::log(g.theta) - n * special::digamma(1.0 + g.p) - n / a + s.sum_log_t();
  return u;
}

}  // namespace detail

inline double log_likelihood(const GllParams& g, const Sample& s) {
  validate(g);
  return detail::loglik_from(g, s, detail::lambda_sums(s, g.lambda, false).log_sum);
}

/// (dl/dtheta, dl/dlambda, dl/dp).
inline Vector3 score(const GllParams& g, const Sample& s) {
  validate(g);
  return detail::score_from(g, s, detail::lambda_sums(s, g.lambda, true));
}

inline Matrix3 observed_hessian(const GllParams& g, const Sample& s) {
  validate(g);
  const auto ls = detail::lambda_sums(s, g.lambda, true);
  const double n = static_cast<double>(s.n());
  const double a = detail::norm_a(g);
  const double a2 = a * a;
  Matrix3 h;
  h(0, 0) = -n * (2.0 + g.p) / (g.theta * g.theta) + n * g.lambda * g.lambda / a2;
  h(0, 1) = -n / a + n * g.lambda * g.theta / a2;
  h(0, 2) = n / g.theta + n * g.lambda / a2;
  h(1, 1) = n * g.theta * g.theta / a2 - ls.inv_sq;
  h(1, 2) = n * g.theta / a2;
  h(2, 2) = -n * special::trigamma(1.0 + g.p) + n / a2;
  h(1, 0) = h(0, 1);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  return h;
}

/// E[(lambda + T)^{-2}] = c e^{lambda theta} sum_r C(p, r) (-lambda)^{p-r} theta^{-r} Gamma(r, lambda theta), integral p.
inline double expected_inv_sq_closed(const GllParams& g) {
  validate(g);
  if (!integral_p(g.p)) throw unsupported_parameters("expected_inv_sq_closed: p must be integral");
  if (!(g.lambda > 0.0)) throw boundary_error("expected_inv_sq_closed: lambda must be positive");
  const int p = static_cast<int>(std::lround(g.p));
  const double z = g.lambda * g.theta;
  double sum = 0.0;
  for (int r = 0; r <= p; ++r) {
    sum += detail::binomial(p, r) * std::pow(-g.lambda, p - r) * std::pow(g.theta, -r) *
           special::upper_incomplete_gamma(r, z);
  }
  return std::exp(detail::log_norm(g) + z) * sum;
}

/// Quadrature of E[(lambda + T)^{-2}].
inline double expected_inv_sq_numeric(const GllParams& g) {
  validate(g);
  if (!(g.lambda > 0.0)) throw boundary_error("expected_inv_sq_numeric: lambda must be positive");
  auto integrand = [&](double t) {
    const double lf = detail::log_density_t(g, t);
    if (!std::isfinite(lf)) return 0.0;
    const double u = g.lambda + t;
    return std::exp(lf) / (u * u);
  };
  return quad::integrate_half_line(integrand, detail::t_scale(g), detail::unit_tolerance(), true).value;
}

/// E[(lambda + T)^{-2}]: closed form for integral p (kept only if quadrature confirms it), else quadrature.
inline double expected_inv_sq(const GllParams& g) {
  const double numeric = expected_inv_sq_numeric(g);
  if (!integral_p(g.p)) return numeric;
  const double closed = expected_inv_sq_closed(g);
  return std::fabs(closed - numeric) <= 1e-8 * std::fabs(numeric) ? closed : numeric;
}

/// Fisher information -E[Hessian] for a sample of size n.
inline Matrix3 expected_information(const GllParams& g, std::size_t n_obs) {
  validate(g);
  if (!(g.lambda > 0.0)) throw boundary_error("expected_information: lambda = 0 is a boundary point");
  const double n = static_cast<double>(n_obs);
  const double a = detail::norm_a(g);
  const double a2 = a * a;
  Matrix3 info;
  info(0, 0) = n * (2.0 + g.p) / (g.theta * g.theta) - n * g.lambda * g.lambda / a2;
  info(0, 1) = n / a - n * g.lambda * g.theta / a2;
  info(0, 2) = -n / g.theta - n * g.lambda / a2;
  info(1, 1) = -n * g.theta * g.theta / a2 + n * expected_inv_sq(g);
  info(1, 2) = -n * g.theta / a2;
  info(2, 2) = n * special::trigamma(1.0 + g.p) - n / a2;
  info(1, 0) = info(0, 1);
  info(2, 0) = info(0, 2);
  info(2, 1) = info(1, 2);
  return info;
}

// ---------------------------------------------------------------------------
// Fitting

struct BoundaryFlags {
  bool lambda_at_zero = false;
  bool p_at_zero = false;
  bool operator==(const BoundaryFlags&) const = default;
};

struct FitOptions {
  bool fix_lambda_zero = false;
  bool fix_p_zero = false;
  double score_tol = 1e-6;
  int max_iterations = 1000;
  bool throw_on_failure = true;    // convergence_error when the final point fails the score test
  std::optional<GllParams> start;  // extra starting point tried before the moment seeds
};

struct FitResult {
  GllParams params;
  double loglik = 0.0;
  double score_norm = 0.0;
  Matrix3 observed_info = Matrix3::Zero();
  Matrix3 expected_info = Matrix3::Zero();
  bool has_expected_info = false;
  Matrix3 covariance = Matrix3::Zero();
  bool converged = false;
  BoundaryFlags boundary;
  std::size_t n = 0;

  /// Standard errors from the covariance diagonal (0 for pinned parameters).
  Vector3 standard_errors() const {
    Vector3 se;
    for (int i = 0; i < 3; ++i) se(i) = covariance(i, i) > 0.0 ? std::sqrt(covariance(i, i)) : 0.0;
    return se;
  }
};

namespace detail {

// Free-parameter mask: theta always free; lambda, p optional.
struct SubModel {
  bool lambda_free;
  bool p_free;

  std::vector<int> indices() const {
    std::vector<int> idx{0};
    if (lambda_free) idx.push_back(1);
    if (p_free) idx.push_back(2);
    return idx;
  }

  GllParams from_log(const opt::Vector& u) const {
    GllParams g{std::exp(u(0)), 0.0, 0.0};
    int k = 1;
    if (lambda_free) g.lambda = std::exp(u(k++));
    if (p_free) g.p = std::exp(u(k++));
    return g;
  }

  opt::Vector to_log(const GllParams& g) const {
    const auto idx = indices();
    opt::Vector u(static_cast<Eigen::Index>(idx.size()));
    const double v[3] = {g.theta, g.lambda, g.p};
    for (std::size_t i = 0; i < idx.size(); ++i) u(static_cast<Eigen::Index>(i)) = std::log(v[idx[i]]);
    return u;
  }
};

struct SubFit {
  GllParams params;
  double loglik = -std::numeric_limits<double>::infinity();
  bool ok = false;
};

inline std::vector<GllParams> moment_seeds(const Sample& s) {
  const double n = static_cast<double>(s.n());
  const double m1 = s.sum_t() / n;
  double v = 0.0;
  for (double t : s.t()) v += (t - m1) * (t - m1);
  v /= std::max(1.0, n - 1.0);
  const double shape = m1 * m1 / v;
  const double rate = m1 / v;
  return {
      {rate, m1, std::max(shape - 1.5, 0.2)},
      {rate, 0.1 * m1, std::max(shape - 1.0, 0.2)},
      {rate, 10.0 * m1, std::max(shape - 2.0, 0.2)},
      {2.0 / m1, 1.0, 0.5},
      {1.0 / m1, 5.0, 1.5},
  };
}

inline SubFit fit_submodel(const Sample& s, SubModel model, const std::vector<GllParams>& seeds, int max_iterations) {
  const double n = static_cast<double>(s.n());
  const auto idx = model.indices();
  auto fg = [&](const opt::Vector& u, opt::Vector& grad) {
    if (!u.allFinite() || u.maxCoeff() > 40.0 || u.minCoeff() < -40.0) return std::numeric_limits<double>::infinity();
    const GllParams g = model.from_log(u);
    const auto ls = lambda_sums(s, g.lambda, true);
    const double l = loglik_from(g, s, ls.log_sum);
    const Vector3 sc = score_from(g, s, ls);
    const double v[3] = {g.theta, g.lambda, g.p};
    for (std::size_t i = 0; i < idx.size(); ++i) grad(static_cast<Eigen::Index>(i)) = -sc(idx[i]) * v[idx[i]] / n;
    return std::isfinite(l) ? -l / n : std::numeric_limits<double>::infinity();
  };
  SubFit best;
  opt::BfgsOptions bo;
  bo.max_iterations = max_iterations;
  bo.grad_tol = 1e-10;
  for (const auto& seed : seeds) {
    GllParams start = seed;
    if (!model.lambda_free) start.lambda = 0.0;
    if (!model.p_free) start.p = 0.0;
    const auto r = opt::bfgs_minimize(fg, model.to_log(start), bo);
    if (!std::isfinite(r.value)) continue;
    const double l = -r.value * n;
    if (l > best.loglik) {
      best.loglik = l;
      best.params = model.from_log(r.x);
      best.ok = true;
    }
  }
  return best;
}

/// Damped Newton iterations on the free parameters in natural coordinates.
inline GllParams newton_polish(const Sample& s, SubModel model, GllParams g, double tol) {
  const auto idx = model.indices();
  const auto m = static_cast<Eigen::Index>(idx.size());
  for (int it = 0; it < 50; ++it) {
    const Vector3 sc = score(g, s);
    const Matrix3 h = observed_hessian(g, s);
    opt::Vector grad(m);
    opt::Matrix hess(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      grad(i) = sc(idx[i]);
      for (Eigen::Index j = 0; j < m; ++j) hess(i, j) = h(idx[i], idx[j]);
    }
    if (grad.lpNorm<Eigen::Infinity>() <= tol) break;
    Eigen::LLT<opt::Matrix> llt(-hess);
    if (llt.info() != Eigen::Success) break;
    const opt::Vector step = llt.solve(grad);
    const double l0 = log_likelihood(g, s);
    double damp = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, damp *= 0.5) {
      GllParams trial = g;
      double* v[3] = {&trial.theta, &trial.lambda, &trial.p};
      for (Eigen::Index i = 0; i < m; ++i) *v[idx[i]] += damp * step(i);
      if (!is_valid(trial) || trial.theta <= 0.0 || (model.lambda_free && trial.lambda <= 0.0) ||
          (model.p_free && trial.p <= 0.0)) {
        continue;
      }
      if (log_likelihood(trial, s) >= l0 - 1e-12 * std::fabs(l0)) {
        g = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return g;
}

}  // namespace detail

/// Fill the information, covariance and diagnostics of a fit at g.
/// Parameters pinned by the caller (`forced`) are exempt from the boundary optimality test.
inline FitResult assemble_fit(const Sample& s, const GllParams& g, BoundaryFlags flags, double score_tol,
                              BoundaryFlags forced = {}) {
  FitResult fr;
  fr.params = g;
  fr.n = s.n();
  fr.boundary = flags;
  fr.loglik = log_likelihood(g, s);
  const Vector3 sc = score(g, s);
  const detail::SubModel model{!flags.lambda_at_zero, !flags.p_at_zero};
  const auto idx = model.indices();
  double norm = 0.0;
  for (int i : idx) norm = std::max(norm, std::fabs(sc(i)));
  fr.score_norm = norm;
  // a pinned parameter is a genuine boundary optimum only if the likelihood does not increase into the interior
  bool kkt = true;
  if (flags.lambda_at_zero && !forced.lambda_at_zero && sc(1) > score_tol) kkt = false;
  if (flags.p_at_zero && !forced.p_at_zero && sc(2) > score_tol) kkt = false;
  fr.converged = norm <= score_tol && kkt;
  fr.observed_info = -observed_hessian(g, s);
  if (g.lambda > 0.0) {
    fr.expected_info = expected_information(g, s.n());
    fr.has_expected_info = true;
  }
  const auto m = static_cast<Eigen::Index>(idx.size());
  opt::Matrix sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = fr.observed_info(idx[i], idx[j]);
  Eigen::LDLT<opt::Matrix> ldlt(sub);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const opt::Matrix inv = ldlt.solve(opt::Matrix::Identity(m, m));
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) fr.covariance(idx[i], idx[j]) = 0.5 * (inv(i, j) + inv(j, i));
  }
  return fr;
}

/// Maximum-likelihood fit. The full model and the boundary sub-models
/// (lambda = 0, p = 0, both) are fitted; the best log-likelihood wins, with
/// ties resolved towards the boundary.
inline FitResult fit_mle(const Sample& s, const FitOptions& options = {}) {
  if (s.n() < 4) throw std::invalid_argument("fit_mle: at least 4 observations are required");
  const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
  if (*lo == *hi) throw degenerate_data("fit_mle: all observations are equal");

  auto seeds = detail::moment_seeds(s);
  if (options.start) {
    validate(*options.start);
    GllParams st = *options.start;
    // log coordinates need strictly positive starting values
    st.lambda = std::max(st.lambda, 1e-6);
    st.p = std::max(st.p, 1e-6);
    seeds.insert(seeds.begin(), st);
  }
  const std::vector<GllParams> short_seeds(seeds.begin(), seeds.begin() + 2);

  struct Candidate {
    detail::SubModel model;
    detail::SubFit fit;
  };
  std::vector<Candidate> cands;
  if (!options.fix_lambda_zero && !options.fix_p_zero) {
    cands.push_back({{true, true}, detail::fit_submodel(s, {true, true}, seeds, options.max_iterations)});
  }
  if (!options.fix_lambda_zero) {
    cands.push_back({{true, false}, detail::fit_submodel(s, {true, false}, short_seeds, options.max_iterations)});
  }
  if (!options.fix_p_zero) {
    cands.push_back({{false, true}, detail::fit_submodel(s, {false, true}, short_seeds, options.max_iterations)});
  }
  cands.push_back({{false, false}, detail::fit_submodel(s, {false, false}, short_seeds, options.max_iterations)});

  // polish every candidate so that comparisons are made at converged points
  for (auto& c : cands) {
    if (!c.fit.ok) continue;
    c.fit.params = detail::newton_polish(s, c.model, c.fit.params, 1e-3 * options.score_tol);
    c.fit.loglik = log_likelihood(c.fit.params, s);
  }
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!c.fit.ok) continue;
    if (!best) {
      best = &c;
      continue;
    }
    const double slack = 1e-9 * std::max(1.0, std::fabs(best->fit.loglik));
    const int free_c = c.model.lambda_free + c.model.p_free;
    const int free_b = best->model.lambda_free + best->model.p_free;
    const bool better = free_c < free_b ? c.fit.loglik >= best->fit.loglik - slack
                                        : c.fit.loglik > best->fit.loglik + slack;
    if (better) best = &c;
  }
  if (!best) throw convergence_error("fit_mle: no starting point produced a finite likelihood");
  const BoundaryFlags flags{!best->model.lambda_free, !best->model.p_free};
  FitResult fr = assemble_fit(s, best->fit.params, flags, options.score_tol,
                              BoundaryFlags{options.fix_lambda_zero, options.fix_p_zero});
  if (!fr.converged && options.throw_on_failure) {
    throw convergence_error("fit_mle: score norm " + std::to_string(fr.score_norm) + " above tolerance at " +
                            describe(fr.params));
  }
  return fr;
}

}  // namespace gll
