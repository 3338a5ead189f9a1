#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gll/estimator.hpp"
#include "gll/sampler.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using gll::GllParams;
using gll::Sample;

namespace {

double& coord(GllParams& g, int i) { return i == 0 ? g.theta : (i == 1 ? g.lambda : g.p); }

// Five-point central difference in coordinate i.
template <class F>
double central_diff(F f, GllParams g, int i) {
  const double h = 1e-4 * std::max(1.0, std::fabs(coord(g, i)));
  auto at = [&](double d) {
    GllParams q = g;
    coord(q, i) += d;
    return f(q);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

bool close_rel(double a, double b, double rel) { return std::fabs(a - b) <= rel * std::max(1.0, std::fabs(b)); }

Sample simulate(const GllParams& g, std::size_t n, std::uint64_t seed) {
  gll::RngState rng(seed);
  return Sample(gll::sample_gll(g, n, rng));
}

}  // namespace

TEST_CASE("sample ingestion", "[estimator]") {
  CHECK_THROWS_AS(Sample({0.2, 0.0, 0.5}), std::domain_error);
  CHECK_THROWS_AS(Sample({0.2, 1.0}), std::domain_error);
  CHECK_THROWS_AS(Sample({0.2, std::nan("")}), std::domain_error);
  CHECK_THROWS_AS(Sample(std::vector<double>{}), std::invalid_argument);
  const Sample s({0.5, 0.25});
  CHECK(s.n() == 2);
  CHECK_THAT(s.sum_t(), WithinRel(3 * std::log(2.0), 1e-15));
}

TEST_CASE("log-likelihood is a sum of log densities", "[estimator]") {
  const GllParams g{1.7, 0.6, 1.3};
  CHECK_THAT(gll::log_likelihood(g, Sample({0.42})), WithinRel(gll::log_pdf(g, 0.42), 1e-13));
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  std::vector<double> xs(10);
  double sum = 0.0;
  for (auto& x : xs) {
    x = u(eng);
    sum += gll::log_pdf(g, x);
  }
  CHECK_THAT(gll::log_likelihood(g, Sample(xs)), WithinRel(sum, 1e-10));
  std::reverse(xs.begin(), xs.end());
  std::rotate(xs.begin(), xs.begin() + 3, xs.end());
  CHECK_THAT(gll::log_likelihood(g, Sample(xs)), WithinRel(sum, 1e-13));
}

TEST_CASE("score at a hand-computed point", "[estimator]") {
  const auto u = gll::score({1, 0, 0}, Sample({std::exp(-1.0)}));
  CHECK_THAT(u(0), WithinAbs(1.0, 1e-14));
  CHECK_THAT(u(1), WithinAbs(-1.0 + 1.0, 1e-14));
}

TEST_CASE("score matches finite differences", "[estimator]") {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> th(0.3, 5.0), la(0.05, 4.0), pp(0.05, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    const GllParams g{th(eng), la(eng), pp(eng)};
    const auto s = simulate({th(eng), la(eng), pp(eng)}, 60, 100 + rep);
    const auto u = gll::score(g, s);
    for (int i = 0; i < 3; ++i) {
      const double fd = central_diff([&](const GllParams& q) { return gll::log_likelihood(q, s); }, g, i);
      INFO(gll::describe(g) << " component " << i);
      CHECK(close_rel(u(i), fd, 1e-6));
    }
  }
}

TEST_CASE("Hessian matches finite differences of the score", "[estimator]") {
  std::mt19937_64 eng(23);
  std::uniform_real_distribution<double> th(0.3, 5.0), la(0.05, 4.0), pp(0.05, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    const GllParams g{th(eng), la(eng), pp(eng)};
    const auto s = simulate({th(eng), la(eng), pp(eng)}, 60, 300 + rep);
    const auto h = gll::observed_hessian(g, s);
    CHECK(h.isApprox(h.transpose(), 0.0));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double fd = central_diff([&](const GllParams& q) { return gll::score(q, s)(i); }, g, j);
        INFO(gll::describe(g) << " entry " << i << "," << j);
        CHECK(close_rel(h(i, j), fd, 1e-4));
      }
    }
  }
}

TEST_CASE("expectation of (lambda + T)^-2", "[estimator]") {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (GllParams g : {GllParams{2, 1, 1}, GllParams{0.5, 3, 0}, GllParams{4, 0.2, 2}, GllParams{1.3, 0.7, 4}}) {
    const double c = std::exp((2 + g.p) * std::log(g.theta) - std::lgamma(1 + g.p) - std::log(1 + g.p + g.lambda * g.theta));
    const double oracle = integrator.integrate(
        [&](double t) {
          if (!(t > 0.0) || !std::isfinite(t)) return 0.0;
          return std::exp(std::log(c) + g.p * std::log(t) - g.theta * t) / (g.lambda + t);
        },
        0.0, std::numeric_limits<double>::infinity(), 1e-13);
    INFO(gll::describe(g));
    CHECK_THAT(gll::expected_inv_sq_closed(g), WithinRel(oracle, 1e-8));
    CHECK_THAT(gll::expected_inv_sq_numeric(g), WithinRel(oracle, 1e-8));
    CHECK_THAT(gll::expected_inv_sq(g), WithinRel(oracle, 1e-8));
  }
  // p = 0: theta^2 e^{lambda theta} E1(lambda theta) / (1 + lambda theta)
  for (double th : {0.5, 2.0}) {
    for (double la : {0.1, 1.0, 6.0}) {
      const double z = th * la;
      CHECK_THAT(gll::expected_inv_sq_closed({th, la, 0}), WithinRel(th * th * std::exp(z) * boost::math::expint(1, z) / (1 + z), 1e-11));
    }
  }
  CHECK_THROWS_AS(gll::expected_inv_sq_closed({1, 0, 1}), gll::boundary_error);
  CHECK_THROWS_AS(gll::expected_inv_sq_closed({1, 1, 1.5}), gll::unsupported_parameters);
  CHECK(std::isfinite(gll::expected_inv_sq({1, 1, 1.5})));
}

TEST_CASE("expected information", "[estimator]") {
  const GllParams g{1.2694, 0.3824, 1.7819};
  const auto info = gll::expected_information(g, 100);
  CHECK(info.isApprox(info.transpose(), 0.0));
  Eigen::SelfAdjointEigenSolver<gll::Matrix3> es(info);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(gll::expected_information(g, 200).isApprox(2.0 * info, 1e-14));
  CHECK_THROWS_AS(gll::expected_information({1, 0, 1}, 10), gll::boundary_error);

  // Monte-Carlo: E[-H] from simulated samples
  gll::Matrix3 mean_h = gll::Matrix3::Zero();
  const int reps = 200;
  for (int r = 0; r < reps; ++r) mean_h -= gll::observed_hessian(g, simulate(g, 500, 900 + r));
  mean_h /= reps * 5.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK_THAT(mean_h(i, j), WithinRel(info(i, j), 0.02));
}

TEST_CASE("mean score vanishes at the truth", "[estimator]") {
  const GllParams g{2.0, 1.0, 1.0};
  const int reps = 200;
  gll::Vector3 sum = gll::Vector3::Zero(), sum_sq = gll::Vector3::Zero();
  for (int r = 0; r < reps; ++r) {
    const auto u = gll::score(g, simulate(g, 500, 5000 + r));
    sum += u;
    sum_sq += u.cwiseProduct(u);
  }
  for (int i = 0; i < 3; ++i) {
    const double m = sum(i) / reps;
    const double sd = std::sqrt(sum_sq(i) / reps - m * m);
    CHECK(std::fabs(m) <= 4 * sd / std::sqrt(double(reps)));
  }
}

TEST_CASE("MLE recovers the generating parameters", "[estimator]") {
  const GllParams truth{1.2694, 0.3824, 1.7819};
  const auto s = simulate(truth, 5000, 4242);
  const auto fit = gll::fit_mle(s);
  CHECK(fit.converged);
  CHECK(fit.score_norm <= 1e-6);
  CHECK_FALSE(fit.boundary.lambda_at_zero);
  CHECK_FALSE(fit.boundary.p_at_zero);
  const gll::Matrix3 cov = gll::expected_information(truth, s.n()).inverse();
  for (int i = 0; i < 3; ++i) {
    GllParams est = fit.params, tr = truth;
    CHECK(std::fabs(coord(est, i) - coord(tr, i)) <= 3 * std::sqrt(cov(i, i)));
  }
  CHECK(fit.loglik >= gll::log_likelihood(truth, s));
  CHECK(fit.covariance.isApprox(fit.covariance.transpose(), 1e-12));
  for (int i = 0; i < 3; ++i) CHECK(fit.covariance(i, i) > 0.0);
  CHECK(fit.has_expected_info);
}

TEST_CASE("refitting from the optimum does not move", "[estimator]") {
  const auto s = simulate({2.0, 1.5, 0.8}, 2000, 31);
  const auto first = gll::fit_mle(s);
  gll::FitOptions opt;
  opt.start = first.params;
  const auto second = gll::fit_mle(s, opt);
  const double d = std::hypot(second.params.theta - first.params.theta, second.params.lambda - first.params.lambda,
                              second.params.p - first.params.p);
  CHECK(d <= 1e-8);
  CHECK(gll::fit_mle(s).params == first.params);
}

TEST_CASE("Hessian negative definite at an interior MLE", "[estimator]") {
  const auto s = simulate({0.8, 2.0, 1.2}, 2000, 57);
  const auto fit = gll::fit_mle(s);
  REQUIRE_FALSE(fit.boundary.lambda_at_zero);
  REQUIRE_FALSE(fit.boundary.p_at_zero);
  Eigen::SelfAdjointEigenSolver<gll::Matrix3> es(gll::observed_hessian(fit.params, s));
  CHECK(es.eigenvalues().maxCoeff() < 0.0);
}

TEST_CASE("boundary fits", "[estimator]") {
  // Log-Lindley data: fixing p = 0 gives an LL fit with zero score in (theta, lambda)
  const auto s = simulate({1.5, 2.0, 0.0}, 3000, 71);
  gll::FitOptions opt;
  opt.fix_p_zero = true;
  const auto ll = gll::fit_mle(s, opt);
  CHECK(ll.boundary.p_at_zero);
  CHECK(ll.params.p == 0.0);
  const auto u = gll::score(ll.params, s);
  CHECK(std::max(std::fabs(u(0)), std::fabs(u(1))) <= 1e-6);
  CHECK(ll.covariance(2, 2) == 0.0);
  const auto full = gll::fit_mle(s);
  CHECK(full.loglik >= ll.loglik - 1e-8);

  // pure Gamma(2, theta) data in t: theta-only model has closed form 2n / sum t
  gll::FitOptions both;
  both.fix_lambda_zero = both.fix_p_zero = true;
  const auto th = gll::fit_mle(s, both);
  CHECK_THAT(th.params.theta, WithinRel(2.0 * s.n() / s.sum_t(), 1e-10));
  CHECK_FALSE(th.has_expected_info);
}

TEST_CASE("fit input validation", "[estimator]") {
  CHECK_THROWS_AS(gll::fit_mle(Sample({0.3, 0.4, 0.5})), std::invalid_argument);
  CHECK_THROWS_AS(gll::fit_mle(Sample({0.3, 0.3, 0.3, 0.3, 0.3})), gll::degenerate_data);
}

TEST_CASE("fit is deterministic", "[estimator]") {
  const auto s = simulate({3.0, 0.5, 2.0}, 800, 8);
  const auto a = gll::fit_mle(s);
  const auto b = gll::fit_mle(s);
  CHECK(a.params == b.params);
  CHECK(a.loglik == b.loglik);
}
