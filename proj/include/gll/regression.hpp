#pragma once

// Regression with GLL responses. The theta-link model maps covariates to the
// per-row theta through the logistic function; the mean-link model maps them
// to the per-row mean mu with (phi, gamma) shared.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gll/dataset.hpp"
#include "gll/distribution.hpp"
#include "gll/errors.hpp"
#include "gll/optimize.hpp"
#include "gll/params.hpp"
#include "gll/special_functions.hpp"

namespace gll {

/// exp(eta) / (1 + exp(eta)) without overflow.
inline double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

struct ThetaLinkModel {
  Eigen::VectorXd beta;  // intercept first
  double lambda = 0.0;
  double p = 0.0;
};

struct MeanLinkModel {
  Eigen::VectorXd beta;
  double phi = 1.0;
  double gamma = 1.0;
};

namespace detail {

struct ObsTerms {
  double loglik, d_theta, d_lambda, d_p;
};

// log f(x) and its partials for a single observation t = -log x.
inline ObsTerms obs_terms(double theta, double lambda, double p, double t, bool need_grad) {
  const double a = 1.0 + p + lambda * theta;
  const double log_t = std::log(t);
  const double lp = p == 0.0 ? 0.0 : p * log_t;
  ObsTerms o{};
  o.loglik = (2.0 + p) * std::log(theta) - std::lgamma(1.0 + p) - std::log(a) + lp + std::log(lambda + t) - (theta - 1.0) * t;
  if (need_grad) {
    o.d_theta = (2.0 + p) / theta - lambda / a - t;
    o.d_lambda = -theta / a + 1.0 / (lambda + t);
    o.d_p = std::log(theta) - special::digamma(1.0 + p) - 1.0 / a + log_t;
  }
  return o;
}

inline void check_design(const Dataset& d) {
  const auto n = d.n();
  const auto cols = d.k() + 1;
  if (n <= cols + 2) {
    throw std::invalid_argument("regression: need more than " + std::to_string(cols + 2) + " observations, have " +
                                std::to_string(n));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.design());
  if (qr.rank() < static_cast<Eigen::Index>(cols)) throw std::invalid_argument("regression: design matrix is rank deficient");
}

struct MeanRow {
  double mu, theta, lambda, p;
};

inline bool mean_row(const MeanLinkModel& m, double eta, MeanRow& out) {
  out.mu = logistic(eta);
  const double mg = out.mu * m.gamma;
  if (!(out.mu > 0.0 && mg < 1.0)) return false;
  out.theta = mean_theta(mg, m.phi);
  if (!(std::isfinite(out.theta) && out.theta > 0.0)) return false;
  out.p = m.gamma == 1.0 ? 0.0 : std::log(m.gamma) / std::log1p(1.0 / out.theta);
  out.lambda = (1.0 + out.p) / (1.0 + out.theta) * m.phi;
  return std::isfinite(out.p) && std::isfinite(out.lambda);
}

}  // namespace detail

/// Log-likelihood and gradient with respect to (beta, lambda, p).
inline double regression_loglik(const ThetaLinkModel& m, const Dataset& d, Eigen::VectorXd* grad = nullptr) {
  const auto x = d.design();
  if (x.cols() != m.beta.size()) throw std::invalid_argument("regression: coefficient count does not match design");
  if (!(m.lambda >= 0.0 && m.p >= 0.0 && std::isfinite(m.lambda) && std::isfinite(m.p))) {
    throw invalid_parameters("theta-link model: lambda and p must be finite and >= 0");
  }
  const Eigen::VectorXd eta = x * m.beta;
  const auto kb = m.beta.size();
  if (grad) grad->setZero(kb + 2);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double theta = logistic(eta(i));
    if (!(theta > 0.0)) throw infeasible_error(static_cast<std::size_t>(i), "theta underflows to 0");
    const double t = -std::log(d.response[static_cast<std::size_t>(i)]);
    const auto o = detail::obs_terms(theta, m.lambda, m.p, t, grad != nullptr);
    total += o.loglik;
    if (grad) {
      grad->head(kb) += o.d_theta * theta * logistic(-eta(i)) * x.row(i).transpose();
      (*grad)(kb) += o.d_lambda;
      (*grad)(kb + 1) += o.d_p;
    }
  }
  return total;
}

/// Log-likelihood and gradient with respect to (beta, phi, gamma).
inline double regression_loglik(const MeanLinkModel& m, const Dataset& d, Eigen::VectorXd* grad = nullptr) {
  const auto x = d.design();
  if (x.cols() != m.beta.size()) throw std::invalid_argument("regression: coefficient count does not match design");
  if (!(m.phi >= 0.0 && m.gamma >= 1.0 && std::isfinite(m.phi) && std::isfinite(m.gamma))) {
    throw invalid_parameters("mean-link model: need phi >= 0 and gamma >= 1");
  }
  const Eigen::VectorXd eta = x * m.beta;
  const auto kb = m.beta.size();
  if (grad) grad->setZero(kb + 2);
  const double phi = m.phi, gamma = m.gamma;
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    detail::MeanRow r;
    if (!detail::mean_row(m, eta(i), r)) {
      throw infeasible_error(static_cast<std::size_t>(i), "mu * gamma = " + std::to_string(logistic(eta(i)) * gamma) +
                                                               " must be < 1");
    }
    const double t = -std::log(d.response[static_cast<std::size_t>(i)]);
    const auto o = detail::obs_terms(r.theta, r.lambda, r.p, t, grad != nullptr);
    total += o.loglik;
    if (!grad) continue;
    const double th = r.theta, mg = r.mu * gamma;
    // theta(m, phi) is defined implicitly by G = 0
    const double g_th = 2.0 * th * (1.0 + phi) * (1.0 - mg) - mg * (2.0 + phi);
    const double g_m = -th * th * (1.0 + phi) - (2.0 + phi) * th - 1.0;
    const double g_phi = th * th * (1.0 - mg) - mg * th;
    const double th_m = -g_m / g_th;
    const double th_phi = -g_phi / g_th;
    const double ell = std::log1p(1.0 / th);
    const double p_th = std::log(gamma) / (ell * ell * th * (1.0 + th));
    const double p_gamma = 1.0 / (gamma * ell);
    const double lam_p = phi / (1.0 + th);
    const double lam_th = -(1.0 + r.p) * phi / ((1.0 + th) * (1.0 + th));
    const double lam_phi = (1.0 + r.p) / (1.0 + th);
    const double d_th = o.d_theta + o.d_p * p_th + o.d_lambda * (lam_th + lam_p * p_th);
    const double dmu = r.mu * logistic(-eta(i));
    grad->head(kb) += d_th * th_m * gamma * dmu * x.row(i).transpose();
    (*grad)(kb) += d_th * th_phi + o.d_lambda * lam_phi;
    (*grad)(kb + 1) += d_th * th_m * r.mu + (o.d_p + o.d_lambda * lam_p) * p_gamma;
  }
  return total;
}

/// Mean of the row's distribution; covariates exclude the intercept.
inline double predict(const ThetaLinkModel& m, const Eigen::VectorXd& covariates) {
  if (covariates.size() + 1 != m.beta.size()) throw std::invalid_argument("predict: covariate count");
  const double theta = logistic(m.beta(0) + m.beta.tail(covariates.size()).dot(covariates));
  if (!(theta > 0.0)) throw infeasible_error(0, "theta underflows to 0");
  return mean(GllParams{theta, m.lambda, m.p});
}

inline double predict(const MeanLinkModel& m, const Eigen::VectorXd& covariates) {
  if (covariates.size() + 1 != m.beta.size()) throw std::invalid_argument("predict: covariate count");
  const double mu = logistic(m.beta(0) + m.beta.tail(covariates.size()).dot(covariates));
  if (!(mu * m.gamma < 1.0)) throw infeasible_error(0, "mu * gamma must be < 1");
  return mu;
}

// ---------------------------------------------------------------------------
// Fitting

struct RegressionOptions {
  bool fix_p_zero = false;     // theta-link: LL regression
  bool fix_gamma_one = false;  // mean-link: LL mean regression
  double grad_tol = 1e-5;      // on the natural-coordinate gradient of the log-likelihood
  int max_iterations = 3000;
  bool throw_on_failure = true;
};

struct RegressionFit {
  std::vector<std::string> names;  // beta names then the two shape parameters
  Eigen::VectorXd estimates;
  Eigen::VectorXd std_errors;  // 0 for parameters pinned at a boundary
  double loglik = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
  bool lambda_at_zero = false;
  bool p_at_zero = false;
  bool gamma_at_one = false;
  bool phi_at_zero = false;
};

struct ThetaLinkFit {
  ThetaLinkModel model;
  RegressionFit fit;
};

struct MeanLinkFit {
  MeanLinkModel model;
  RegressionFit fit;
};

namespace detail {

// Shape parameters enter the optimizer as log(v - offset); pinned ones stay at `offset`.
struct ShapeCoord {
  bool free;
  double offset;
};

template <class Model>
struct RegressionProblem {
  const Dataset& data;
  Eigen::Index kb;
  ShapeCoord s1, s2;
  Model (*make)(const Eigen::VectorXd& natural);

  Eigen::Index dim() const { return kb + s1.free + s2.free; }

  Eigen::VectorXd natural(const opt::Vector& u) const {
    Eigen::VectorXd v(kb + 2);
    v.head(kb) = u.head(kb);
    Eigen::Index k = kb;
    v(kb) = s1.free ? s1.offset + std::exp(u(k++)) : s1.offset;
    v(kb + 1) = s2.free ? s2.offset + std::exp(u(k++)) : s2.offset;
    return v;
  }

  opt::Vector coords(const Eigen::VectorXd& v) const {
    opt::Vector u(dim());
    u.head(kb) = v.head(kb);
    Eigen::Index k = kb;
    if (s1.free) u(k++) = std::log(v(kb) - s1.offset);
    if (s2.free) u(k++) = std::log(v(kb + 1) - s2.offset);
    return u;
  }

  // -l/n and its gradient in optimizer coordinates; +inf when infeasible
  double objective(const opt::Vector& u, opt::Vector& g) const {
    if (!u.allFinite() || (dim() > kb && u.tail(dim() - kb).maxCoeff() > 30.0)) {
      return std::numeric_limits<double>::infinity();
    }
    const auto v = natural(u);
    Eigen::VectorXd gv;
    double l;
    try {
      l = regression_loglik(make(v), data, &gv);
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::infinity();
    }
    if (!std::isfinite(l) || !gv.allFinite()) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(data.n());
    g.resize(dim());
    g.head(kb) = -gv.head(kb) / n;
    Eigen::Index k = kb;
    if (s1.free) g(k++) = -gv(kb) * (v(kb) - s1.offset) / n;
    if (s2.free) g(k++) = -gv(kb + 1) * (v(kb + 1) - s2.offset) / n;
    return -l / n;
  }

  std::vector<int> free_natural() const {
    std::vector<int> idx;
    for (Eigen::Index j = 0; j < kb; ++j) idx.push_back(static_cast<int>(j));
    if (s1.free) idx.push_back(static_cast<int>(kb));
    if (s2.free) idx.push_back(static_cast<int>(kb + 1));
    return idx;
  }
};

struct Candidate {
  Eigen::VectorXd natural;
  double loglik = -std::numeric_limits<double>::infinity();
  bool ok = false;
};

// Newton steps in optimizer coordinates with a finite-difference Hessian of the analytic gradient.
template <class P>
opt::Vector newton_polish(const P& prob, opt::Vector u) {
  const Eigen::Index m = prob.dim();
  opt::Vector g(m), gp(m), gm(m);
  for (int it = 0; it < 20; ++it) {
    const double f0 = prob.objective(u, g);
    if (!std::isfinite(f0) || g.lpNorm<Eigen::Infinity>() <= 1e-13) break;
    opt::Matrix h(m, m);
    bool ok = true;
    for (Eigen::Index j = 0; j < m && ok; ++j) {
      const double step = 1e-5 * std::max(1.0, std::fabs(u(j)));
      opt::Vector up = u, um = u;
      up(j) += step;
      um(j) -= step;
      ok = std::isfinite(prob.objective(up, gp)) && std::isfinite(prob.objective(um, gm));
      if (ok) h.col(j) = (gp - gm) / (2.0 * step);
    }
    if (!ok) break;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::LLT<opt::Matrix> llt(h);
    if (llt.info() != Eigen::Success) break;
    const opt::Vector dir = -llt.solve(g);
    double damp = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k, damp *= 0.5) {
      opt::Vector trial = u + damp * dir;
      opt::Vector gt(m);
      const double ft = prob.objective(trial, gt);
      // near the optimum the value change drowns in rounding, so a smaller gradient also counts
      const bool lower = ft <= f0;
      const bool flatter = ft <= f0 + 1e-14 * std::fabs(f0) && gt.lpNorm<Eigen::Infinity>() < g.lpNorm<Eigen::Infinity>();
      if (std::isfinite(ft) && (lower || flatter)) {
        u = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return u;
}

template <class P>
Candidate run_candidate(const P& prob, const std::vector<Eigen::VectorXd>& starts, int max_iterations) {
  Candidate best;
  opt::BfgsOptions bo;
  bo.max_iterations = max_iterations;
  bo.grad_tol = 1e-11;
  const double n = static_cast<double>(prob.data.n());
  for (const auto& s : starts) {
    Eigen::VectorXd v = s;
    if (!prob.s1.free) v(prob.kb) = prob.s1.offset;
    if (!prob.s2.free) v(prob.kb + 1) = prob.s2.offset;
    opt::Vector u0 = prob.coords(v);
    opt::Vector g0;
    if (!std::isfinite(prob.objective(u0, g0))) continue;
    auto r = opt::bfgs_minimize([&](const opt::Vector& u, opt::Vector& g) { return prob.objective(u, g); }, u0, bo);
    if (!std::isfinite(r.value)) continue;
    const opt::Vector u = newton_polish(prob, r.x);
    opt::Vector g;
    const double f = prob.objective(u, g);
    if (std::isfinite(f) && -f * n > best.loglik) {
      best.loglik = -f * n;
      best.natural = prob.natural(u);
      best.ok = true;
    }
  }
  return best;
}

// Natural-coordinate gradient norm and observed-information standard errors for the free parameters.
template <class P>
void finish(const P& prob, const Candidate& c, RegressionFit& out) {
  const auto idx = prob.free_natural();
  const Eigen::VectorXd v = c.natural;
  Eigen::VectorXd g;
  out.loglik = regression_loglik(prob.make(v), prob.data, &g);
  out.estimates = v;
  out.grad_norm = 0.0;
  for (int j : idx) out.grad_norm = std::max(out.grad_norm, std::fabs(g(j)));
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const int j = idx[static_cast<std::size_t>(a)];
    double step = 1e-5 * std::max(1.0, std::fabs(v(j)));
    // stay inside the domain of shape parameters near their boundary
    if (j >= prob.kb) {
      const double off = j == prob.kb ? prob.s1.offset : prob.s2.offset;
      step = std::min(step, 0.5 * (v(j) - off));
    }
    Eigen::VectorXd vp = v, vm = v, gp, gm;
    vp(j) += step;
    vm(j) -= step;
    regression_loglik(prob.make(vp), prob.data, &gp);
    regression_loglik(prob.make(vm), prob.data, &gm);
    for (Eigen::Index b = 0; b < m; ++b) h(b, a) = (gp(idx[static_cast<std::size_t>(b)]) - gm(idx[static_cast<std::size_t>(b)])) / (2.0 * step);
  }
  h = 0.5 * (h + h.transpose()).eval();
  out.std_errors = Eigen::VectorXd::Zero(v.size());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(-h);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
    for (Eigen::Index a = 0; a < m; ++a) out.std_errors(idx[static_cast<std::size_t>(a)]) = std::sqrt(std::max(0.0, cov(a, a)));
  }
}

inline std::vector<std::string> beta_names(const Dataset& d) {
  std::vector<std::string> names{"(intercept)"};
  for (const auto& s : d.covariate_names) names.push_back(s);
  return names;
}

inline ThetaLinkModel theta_model_from(const Eigen::VectorXd& v) {
  const auto kb = v.size() - 2;
  return {v.head(kb), v(kb), v(kb + 1)};
}

inline MeanLinkModel mean_model_from(const Eigen::VectorXd& v) {
  const auto kb = v.size() - 2;
  return {v.head(kb), v(kb), v(kb + 1)};
}

// Least squares of logit(y) on the design.
inline Eigen::VectorXd logit_ols(const Dataset& d) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(d.n()));
  for (std::size_t i = 0; i < d.n(); ++i) z(static_cast<Eigen::Index>(i)) = std::log(d.response[i] / (1.0 - d.response[i]));
  return d.design().colPivHouseholderQr().solve(z);
}

template <class P>
const Candidate* pick(const std::vector<std::pair<P, Candidate>>& cands) {
  // prefer fewer free parameters unless the larger model is strictly better
  const std::pair<P, Candidate>* best = nullptr;
  for (const auto& c : cands) {
    if (!c.second.ok) continue;
    if (!best) {
      best = &c;
      continue;
    }
    const double slack = 1e-9 * std::max(1.0, std::fabs(best->second.loglik));
    const bool smaller = c.first.dim() < best->first.dim();
    const bool better = smaller ? c.second.loglik >= best->second.loglik - slack
                                : c.second.loglik > best->second.loglik + slack;
    if (better) best = &c;
  }
  return best ? &best->second : nullptr;
}

}  // namespace detail

inline ThetaLinkFit fit_theta_model(const Dataset& d, const RegressionOptions& options = {}) {
  detail::check_design(d);
  const auto kb = static_cast<Eigen::Index>(d.k() + 1);
  using Problem = detail::RegressionProblem<ThetaLinkModel>;
  std::vector<Problem> problems;
  // candidate sub-models: (lambda free?, p free?)
  std::vector<std::pair<bool, bool>> shapes;
  if (!options.fix_p_zero) shapes.push_back({true, true});
  shapes.push_back({true, false});
  if (!options.fix_p_zero) shapes.push_back({false, true});
  shapes.push_back({false, false});

  std::vector<Eigen::VectorXd> starts;
  for (double b0 : {0.0, 1.5, -1.0}) {
    for (auto [lam, p] : {std::pair{1.0, 1.0}, std::pair{0.3, 2.0}, std::pair{2.0, 0.5}}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(kb + 2);
      v(0) = b0;
      v(kb) = lam;
      v(kb + 1) = p;
      starts.push_back(v);
    }
  }

  std::vector<std::pair<Problem, detail::Candidate>> cands;
  for (auto [lf, pf] : shapes) {
    Problem prob{d, kb, {lf, 0.0}, {pf, 0.0}, &detail::theta_model_from};
    const std::vector<Eigen::VectorXd> use = lf && pf ? starts : std::vector<Eigen::VectorXd>(starts.begin(), starts.begin() + 3);
    cands.emplace_back(prob, detail::run_candidate(prob, use, options.max_iterations));
  }
  const detail::Candidate* best = detail::pick(cands);
  if (!best) throw convergence_error("fit_theta_model: no feasible starting point");
  const Problem* bp = nullptr;
  for (const auto& c : cands)
    if (&c.second == best) bp = &c.first;

  ThetaLinkFit out;
  out.model = detail::theta_model_from(best->natural);
  out.fit.names = detail::beta_names(d);
  out.fit.names.push_back("lambda");
  out.fit.names.push_back("p");
  detail::finish(*bp, *best, out.fit);
  out.fit.lambda_at_zero = !bp->s1.free;
  out.fit.p_at_zero = !bp->s2.free;
  Eigen::VectorXd g;
  regression_loglik(out.model, d, &g);
  bool kkt = true;
  if (out.fit.lambda_at_zero && g(kb) > options.grad_tol) kkt = false;
  if (out.fit.p_at_zero && !options.fix_p_zero && g(kb + 1) > options.grad_tol) kkt = false;
  out.fit.converged = out.fit.grad_norm <= options.grad_tol && kkt;
  if (!out.fit.converged && options.throw_on_failure) {
    throw convergence_error("fit_theta_model: gradient norm " + std::to_string(out.fit.grad_norm) + " above tolerance");
  }
  return out;
}

inline MeanLinkFit fit_mean_model(const Dataset& d, const RegressionOptions& options = {}) {
  detail::check_design(d);
  const auto kb = static_cast<Eigen::Index>(d.k() + 1);
  using Problem = detail::RegressionProblem<MeanLinkModel>;

  const Eigen::VectorXd b_ols = detail::logit_ols(d);
  const Eigen::VectorXd eta = d.design() * b_ols;
  const double mu_max = logistic(eta.maxCoeff());
  std::vector<Eigen::VectorXd> starts;
  for (double phi : {1.0, 0.2, 5.0}) {
    for (double frac : {0.1, 0.5}) {
      Eigen::VectorXd v(kb + 2);
      v.head(kb) = b_ols;
      v(kb) = phi;
      v(kb + 1) = 1.0 + frac * (1.0 / mu_max - 1.0);
      starts.push_back(v);
    }
  }
  // the intercept-only mean as an alternative start
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(kb + 2);
  double ybar = 0.0;
  for (double y : d.response) ybar += y;
  ybar /= static_cast<double>(d.n());
  v0(0) = std::log(ybar / (1.0 - ybar));
  v0(kb) = 1.0;
  v0(kb + 1) = 1.0 + 0.1 * (1.0 / ybar - 1.0);
  starts.push_back(v0);

  // candidate sub-models: (phi free?, gamma free?); phi = 0 gives lambda = 0 in every row
  std::vector<std::pair<bool, bool>> shapes;
  if (!options.fix_gamma_one) shapes.push_back({true, true});
  shapes.push_back({true, false});
  if (!options.fix_gamma_one) shapes.push_back({false, true});
  shapes.push_back({false, false});
  std::vector<std::pair<Problem, detail::Candidate>> cands;
  for (auto [ff, gf] : shapes) {
    Problem prob{d, kb, {ff, 0.0}, {gf, 1.0}, &detail::mean_model_from};
    const std::vector<Eigen::VectorXd> use =
        ff && gf ? starts : std::vector<Eigen::VectorXd>{starts[0], starts[2], starts[4], starts.back()};
    cands.emplace_back(prob, detail::run_candidate(prob, use, options.max_iterations));
  }
  const detail::Candidate* best = detail::pick(cands);
  if (!best) throw infeasible_error(0, "fit_mean_model: no feasible starting point");
  const Problem* bp = nullptr;
  for (const auto& c : cands)
    if (&c.second == best) bp = &c.first;

  MeanLinkFit out;
  out.model = detail::mean_model_from(best->natural);
  out.fit.names = detail::beta_names(d);
  out.fit.names.push_back("phi");
  out.fit.names.push_back("gamma");
  detail::finish(*bp, *best, out.fit);
  out.fit.gamma_at_one = !bp->s2.free;
  out.fit.phi_at_zero = !bp->s1.free;
  Eigen::VectorXd g;
  regression_loglik(out.model, d, &g);
  bool kkt = true;
  if (out.fit.phi_at_zero && g(kb) > options.grad_tol) kkt = false;
  if (out.fit.gamma_at_one && !options.fix_gamma_one && g(kb + 1) > options.grad_tol) kkt = false;
  out.fit.converged = out.fit.grad_norm <= options.grad_tol && kkt;
  if (!out.fit.converged && options.throw_on_failure) {
    throw convergence_error("fit_mean_model: gradient norm " + std::to_string(out.fit.grad_norm) + " above tolerance");
  }
  return out;
}

}  // namespace gll
