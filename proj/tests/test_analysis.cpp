#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gll/analysis.hpp"
#include "gll/distribution.hpp"

using gll::CdfShape;
using gll::GllParams;
using gll::Verdict;

TEST_CASE("analysis grid", "[analysis]") {
  const auto g = gll::analysis_grid();
  REQUIRE(g.size() == 2048);
  CHECK(g.front() == Catch::Approx(1e-8).epsilon(1e-12));
  CHECK(1.0 - g.back() == Catch::Approx(1e-8).epsilon(1e-6));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(gll::analysis_grid(100).size() == 100);
}

TEST_CASE("likelihood ratio monotonicity", "[analysis]") {
  const GllParams a{1, 1, 2}, b{2, 2, 1};
  auto r = gll::lr_ratio_monotone(a, b);
  CHECK(r.verdict == Verdict::pass);
  CHECK_FALSE(r.first_violation);

  CHECK(gll::lr_ratio_monotone(a, a).verdict == Verdict::pass);

  // LL(theta, lambda) dominates GLL(theta, lambda, p > 0)
  for (double p : {0.5, 1.0, 3.0}) {
    CHECK(gll::lr_ratio_monotone({1.5, 0.7, p}, {1.5, 0.7, 0.0}).verdict == Verdict::pass);
  }

  auto guard = gll::lr_ratio_monotone(b, a);
  CHECK(guard.verdict == Verdict::outside_regime);
  CHECK(guard.message.find("hypothesis not satisfied") != std::string::npos);

  // reversed roles give a decreasing ratio
  auto rev = gll::lr_ratio_monotone({2, 2, 2}, {1, 2, 2});
  CHECK(rev.verdict == Verdict::outside_regime);
}

TEST_CASE("ratio check detects a decreasing ratio", "[analysis]") {
  // theta2 < theta1 with the rest equal: ratio x^{theta2-theta1} * const decreases in x
  const GllParams hi{2.0, 1.0, 1.0}, lo{1.0, 1.0, 1.0};
  auto r = gll::lr_ratio_monotone(lo, hi);
  CHECK(r.verdict == Verdict::pass);
  // the opposite ratio decreases somewhere
  const auto grid = gll::analysis_grid(64);
  double prev = -1e300;
  bool decreasing = false;
  for (double x : grid) {
    const double v = gll::log_pdf(lo, x) - gll::log_pdf(hi, x);
    decreasing |= v < prev;
    prev = v;
  }
  CHECK(decreasing);
}

TEST_CASE("moment and hazard ordering", "[analysis]") {
  const GllParams a{1, 1, 2}, b{2, 2, 1};
  auto r = gll::moment_hazard_ordering(a, b);
  INFO(r.message);
  CHECK(r.verdict == Verdict::pass);
  CHECK(gll::moment_hazard_ordering(a, a).verdict == Verdict::pass);

  for (double k : {0.5, 1.0, 2.0, 3.0}) CHECK(gll::moment(a, k) <= gll::moment(b, k));
  for (double x : {0.1, 0.5, 0.9}) CHECK(gll::hazard(a, x) >= gll::hazard(b, x));

  auto guard = gll::moment_hazard_ordering(b, a);
  CHECK(guard.verdict == Verdict::outside_regime);
  CHECK(guard.message.find("hypothesis not satisfied") != std::string::npos);
}

TEST_CASE("random ordered pairs", "[analysis]") {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> th(0.3, 3.0), la(0.0, 3.0), pp(0.0, 3.0);
  for (int rep = 0; rep < 15; ++rep) {
    double t1 = th(eng), t2 = th(eng), l1 = la(eng), l2 = la(eng), q1 = pp(eng), q2 = pp(eng);
    if (t1 > t2) std::swap(t1, t2);
    if (l1 > l2) std::swap(l1, l2);
    if (q2 > q1) std::swap(q1, q2);
    const GllParams a{t1, l1, q1}, b{t2, l2, q2};
    INFO(gll::describe(a) << " vs " << gll::describe(b));
    CHECK(gll::lr_ratio_monotone(a, b, 512).verdict == Verdict::pass);
    auto m = gll::moment_hazard_ordering(a, b, 512);
    INFO(m.message);
    CHECK(m.verdict == Verdict::pass);
  }
}

TEST_CASE("log-concavity", "[analysis]") {
  auto r = gll::log_concavity_check({2, 1, 1});
  CHECK(r.exact.verdict == Verdict::pass);
  CHECK(r.printed.verdict == Verdict::pass);

  auto out = gll::log_concavity_check({0.8, 1, 1});
  CHECK(out.exact.verdict == Verdict::outside_regime);
  CHECK(out.printed.verdict == Verdict::outside_regime);

  // f proportional to -log x near theta = 1 is log-convex on (0, 1/e)
  auto edge = gll::log_concavity_check({1.0001, 0, 0});
  CHECK(edge.exact.verdict == Verdict::fail);
  REQUIRE(edge.exact.first_violation);
  CHECK(edge.exact.first_violation->x < std::exp(-1.0));
  CHECK(edge.printed.verdict == Verdict::pass);

  // large theta is log-concave
  for (double p : {0.0, 1.0, 3.0})
    for (double lambda : {0.0, 0.5, 4.0}) CHECK(gll::log_concavity_check({1.0 + (p + 1.0) / 4.0 + 0.01, lambda, p}).exact.verdict == Verdict::pass);
}

TEST_CASE("exact second derivative of the log density", "[analysis]") {
  // -x^{-2} B(t) against a Richardson-refined central difference of log_pdf
  for (GllParams g : {GllParams{2, 1, 1}, GllParams{1.2, 0.3, 2}, GllParams{3, 0, 0.5}}) {
    for (double x : {0.05, 0.3, 0.6, 0.9}) {
      auto d2 = [&](double h) {
        return (gll::log_pdf(g, x + h) - 2 * gll::log_pdf(g, x) + gll::log_pdf(g, x - h)) / (h * h);
      };
      const double h = 1e-3 * x;
      const double fd = (16 * d2(h / 2) - d2(h)) / 15;
      const double t = -std::log(x), u = 1 / (g.lambda + t);
      const double b = (g.theta - 1) - g.p / t + g.p / (t * t) - u + u * u;
      CHECK_THAT(fd, Catch::Matchers::WithinRel(-b / (x * x), 1e-5));
    }
  }
}

TEST_CASE("cdf shape", "[analysis]") {
  auto c = gll::cdf_shape_classify({0.7, 1, 2});
  CHECK(c.shape == CdfShape::concave);
  CHECK(c.report.verdict == Verdict::pass);

  auto n = gll::cdf_shape_classify({2, 1, 1});
  CHECK(n.shape == CdfShape::neither);
  CHECK(n.report.verdict == Verdict::pass);

  auto v = gll::cdf_shape_classify({2, 2, 0});
  CHECK(v.shape == CdfShape::convex);
  CHECK(v.report.verdict == Verdict::pass);

  // theta > 1 with p = 0 and lambda (theta - 1) < 1: no prediction, shape still reported
  auto o = gll::cdf_shape_classify({1.5, 0.5, 0});
  CHECK(o.report.verdict == Verdict::outside_regime);
  CHECK_FALSE(o.predicted);
  CHECK(o.shape == CdfShape::neither);

  // the sign scan agrees with a finite-difference F''
  for (GllParams g : {GllParams{0.7, 1, 2}, GllParams{2, 2, 0}}) {
    const auto shape = gll::cdf_shape_classify(g, 256).shape;
    for (double x = 0.05; x < 0.96; x += 0.05) {
      const double h = 1e-4;
      const double f2 = (gll::cdf(g, x + h) - 2 * gll::cdf(g, x) + gll::cdf(g, x - h)) / (h * h);
      if (shape == CdfShape::concave) CHECK(f2 <= 1e-5);
      if (shape == CdfShape::convex) CHECK(f2 >= -1e-5);
    }
  }
}

TEST_CASE("dominance over the premium specifications", "[analysis]") {
  for (double theta : {0.3, 0.7, 1.0, 2.0})
    for (double lambda : {0.0, 0.5, 1.5})
      for (double p : {0.0, 1.0, 2.0}) {
        auto r = gll::dominance_check({theta, lambda, p});
        INFO(theta << " " << lambda << " " << p);
        CHECK(r.verdict == Verdict::pass);
      }
}

TEST_CASE("reports are reproducible", "[analysis]") {
  const GllParams a{1, 1, 2}, b{2, 2, 1};
  auto r1 = gll::moment_hazard_ordering(a, b), r2 = gll::moment_hazard_ordering(a, b);
  CHECK(r1.grid == r2.grid);
  CHECK(r1.message == r2.message);
  CHECK(r1.verdict == r2.verdict);
  CHECK_THROWS_AS(gll::dominance_check({-1, 0, 0}), gll::invalid_parameters);
}
