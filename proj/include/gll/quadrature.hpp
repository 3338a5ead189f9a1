#pragma once

// Adaptive Gauss-Kronrod (10/21 point) integration on finite intervals and
// on the half line (0, inf) by geometric panels.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "gll/errors.hpp"

namespace gll::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
};

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-12;
  int max_subdivisions = 4000;
};

namespace detail {

inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077652050877297, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the nodes xgk[1], xgk[3], ..., xgk[9].
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace detail

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
template <class F>
Result gk21(F&& f, double a, double b) {
  using detail::wg;
  using detail::wgk;
  using detail::xgk;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * wgk[10];
  double gauss = 0.0;
  double resabs = std::fabs(kronrod);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * xgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += wgk[j] * (f1[j] + f2[j]);
    resabs += wgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) gauss += wg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * kronrod;
  double resasc = wgk[10] * std::fabs(fc - mean);
  for (int j = 0; j < 10; ++j) resasc += wgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  Result r;
  r.value = kronrod * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  r.abs_error = err;
  r.evaluations = 21;
  if (!std::isfinite(r.value)) throw convergence_error("quadrature: non-finite integrand");
  return r;
}

/// Globally adaptive integration of f over [a, b]; bisects the panel with the
/// largest error estimate until the total error meets the tolerance.
template <class F>
Result integrate(F&& f, double a, double b, Tolerance tol = {}) {
  if (a == b) return {};
  Result first = gk21(f, a, b);
  std::priority_queue<detail::Segment> heap;
  heap.push({a, b, first.value, first.abs_error});
  double total = first.value;
  double error = first.abs_error;
  int evaluations = first.evaluations;
  // Panels too narrow to split further keep their error here.
  double frozen_error = 0.0;
  for (int i = 0; i < tol.max_subdivisions; ++i) {
    if (error <= std::max(tol.abs, tol.rel * std::fabs(total))) break;
    if (heap.empty()) break;
    const detail::Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b) || std::fabs(s.b - s.a) < 1e-14 * std::max(std::fabs(s.a), std::fabs(s.b))) {
      frozen_error += s.error;
      continue;
    }
    const Result left = gk21(f, s.a, mid);
    const Result right = gk21(f, mid, s.b);
    evaluations += left.evaluations + right.evaluations;
    total += left.value + right.value - s.value;
    error += left.abs_error + right.abs_error - s.error;
    heap.push({s.a, mid, left.value, left.abs_error});
    heap.push({mid, s.b, right.value, right.abs_error});
  }
  // Re-sum to shed accumulated cancellation from the running totals.
  double value = 0.0;
  double err = frozen_error;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (err > 1e3 * std::max(tol.abs, tol.rel * std::fabs(value))) {
    throw convergence_error("quadrature: tolerance not reached on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
  }
  return {value, err, evaluations};
}

/// Integral over (0, inf). The panel [0, scale] (or, with refine_origin, the
/// panels [scale/2^{k+1}, scale/2^k]) plus doubling panels [scale 2^k, scale 2^{k+1}]
/// until two consecutive panels fall below the tolerance.
template <class F>
Result integrate_half_line(F&& f, double scale, Tolerance tol = {}, bool refine_origin = false) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::domain_error("integrate_half_line: scale must be positive");
  Tolerance panel_tol = tol;
  panel_tol.abs = tol.abs / 64.0;
  Result total;
  auto negligible = [&](const Result& r) {
    return std::fabs(r.value) <= std::max(tol.abs * 1e-3, tol.rel * 1e-2 * std::fabs(total.value));
  };
  auto add = [&](const Result& r) {
    total.value += r.value;
    total.abs_error += r.abs_error;
    total.evaluations += r.evaluations;
  };
  if (refine_origin) {
    double hi = scale;
    int quiet = 0;
    for (int k = 0; k < 1000 && quiet < 2; ++k) {
      const Result r = integrate(f, 0.5 * hi, hi, panel_tol);
      add(r);
      quiet = negligible(r) ? quiet + 1 : 0;
      hi *= 0.5;
      if (hi < std::numeric_limits<double>::min()) break;
    }
  } else {
    add(integrate(f, 0.0, scale, panel_tol));
  }
  double lo = scale;
  int quiet = 0;
  for (int k = 0; quiet < 2; ++k) {
    if (k >= 1000 || !std::isfinite(2.0 * lo)) throw convergence_error("quadrature: half-line tail did not decay");
    const Result r = integrate(f, lo, 2.0 * lo, panel_tol);
    add(r);
    quiet = negligible(r) ? quiet + 1 : 0;
    lo *= 2.0;
  }
  return total;
}

}  // namespace gll::quad
