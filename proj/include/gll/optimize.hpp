#pragma once

// Quasi-Newton minimisation (BFGS, Armijo backtracking) and a damped Newton
// polish used by the estimators. Objectives return +inf outside their domain;
// the line search then backtracks.

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace gll::opt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct BfgsOptions {
  int max_iterations = 500;
  double grad_tol = 1e-8;      // on the infinity norm of the gradient
  double value_tol = 1e-15;    // relative change in value over one step
};

struct BfgsResult {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
  Vector grad;
  int iterations = 0;
  bool converged = false;
};

/// fg(x, grad) returns f(x) and fills grad; non-finite values mark infeasible points.
template <class FG>
BfgsResult bfgs_minimize(FG&& fg, Vector x0, const BfgsOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.grad = Vector::Zero(n);
  res.value = fg(res.x, res.grad);
  if (!std::isfinite(res.value)) return res;
  Matrix hinv = Matrix::Identity(n, n);
  Vector g_new(n);
  int quiet = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it;
    if (res.grad.lpNorm<Eigen::Infinity>() <= opt.grad_tol) {
      res.converged = true;
      return res;
    }
    Vector dir = -hinv * res.grad;
    double slope = dir.dot(res.grad);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -res.grad;
      slope = dir.dot(res.grad);
    }
    // cap the step so log-coordinates cannot jump by more than ~5 units
    const double max_step = dir.lpNorm<Eigen::Infinity>();
    double step = max_step > 5.0 ? 5.0 / max_step : 1.0;
    Vector x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + step * dir;
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (hinv.isIdentity()) return res;
      hinv.setIdentity();
      continue;
    }
    const Vector s = x_new - res.x;
    const Vector y = g_new - res.grad;
    const double sy = s.dot(y);
    const double change = std::fabs(res.value - f_new);
    res.x = x_new;
    res.grad = g_new;
    const double f_old = res.value;
    res.value = f_new;
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (it == 0) hinv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Matrix eye = Matrix::Identity(n, n);
      hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    quiet = change <= opt.value_tol * std::max(1.0, std::fabs(f_old)) ? quiet + 1 : 0;
    if (quiet >= 3) {
      res.iterations = it + 1;
      res.converged = res.grad.lpNorm<Eigen::Infinity>() <= opt.grad_tol;
      return res;
    }
  }
  res.converged = res.grad.lpNorm<Eigen::Infinity>() <= opt.grad_tol;
  return res;
}

}  // namespace gll::opt
