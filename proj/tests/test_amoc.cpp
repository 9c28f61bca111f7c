#include <cmath>
#include <numbers>

#include <doctest.h>

#include "changeforge/amoc.hpp"
#include "oracles.hpp"

using namespace changeforge;

TEST_CASE("cusum critical value table") {
  CHECK(cusum_critical_value(0.05) == doctest::Approx(1.358));
  CHECK(cusum_critical_value(0.01) > cusum_critical_value(0.05));
  CHECK_THROWS(cusum_critical_value(0.2));
}

TEST_CASE("cusum profile ends at zero") {
  SplitMix64 rng(5);
  TimeSeries y(oracle::gaussian(rng, 300));
  auto prof = cusum_profile(y);
  REQUIRE(prof.size() == 300);
  CHECK(prof.back() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("cusum locates a strong step") {
  SplitMix64 rng(2024);
  std::vector<double> v = oracle::gaussian(rng, 100);
  for (int t = 51; t <= 100; ++t) v[t - 1] += 3.0;
  auto r = cusum_max_test(v, 0.05);
  CHECK(r.reject);
  CHECK(r.location >= 46);
  CHECK(r.location <= 56);
  CHECK(r.threshold == doctest::Approx(1.358));
}

TEST_CASE("wbs contrast") {
  TimeSeries y{0, 0, 2, 2};
  CHECK(wbs_contrast(y, 1, 3, 4) == doctest::Approx(-2.0));
  TimeSeries neg{0, 0, -2, -2};
  CHECK(wbs_contrast(neg, 1, 3, 4) == doctest::Approx(2.0));
  CHECK(wbs_contrast({5, 5, 5, 5, 5}, 1, 3, 5) == doctest::Approx(0.0));
  MeanContrast mc(y.values());
  CHECK(mc(1, 3, 4) == doctest::Approx(-2.0));
  CHECK(mc.best(1, 4).first == 3);
}

TEST_CASE("glr contrast") {
  TimeSeries c{3, 3, 3, 3, 3, 3};
  for (int b = 2; b <= 6; ++b) CHECK(glr_contrast(c, 1, b, 6, SegmentFamily::constant_mean) == doctest::Approx(0.0));
  TimeSeries y{0, 0, 2, 2};
  GlrOptions known{1.0, 1e12};
  int arg = 0;
  double best = -1;
  for (int b = 2; b <= 4; ++b) {
    double g = glr_contrast(y, 1, b, 4, SegmentFamily::constant_mean, known);
    if (g > best) best = g, arg = b;
  }
  CHECK(arg == 3);
  // Exact split with a profiled variance: both sides fit perfectly.
  CHECK(glr_contrast(y, 1, 3, 4, SegmentFamily::constant_mean) == doctest::Approx(1e12));
  GlrScanner scan(y, SegmentFamily::constant_mean, known);
  CHECK(scan.best(1, 4).first == 3);
}

TEST_CASE("fmax on seasonal data") {
  const int n = 240, p = 12;
  SplitMix64 rng(8);
  std::vector<double> v(n);
  for (int t = 1; t <= n; ++t) v[t - 1] = 1.5 * std::sin(2 * std::numbers::pi * t / p) + rng.normal();
  auto null = fmax_seasonal(v, p, 0.05);
  CHECK_FALSE(null.reject);
  for (int t = n / 2 + 1; t <= n; ++t) v[t - 1] += 5.0;
  auto alt = fmax_seasonal(v, p, 0.05);
  CHECK(alt.reject);
  CHECK(std::abs(alt.location - (n / 2 + 1)) <= 5);
}

TEST_CASE("fmax is zero when nothing is explained") {
  // Pure seasonal pattern without noise: every split leaves SSE at zero.
  std::vector<double> v(48);
  for (int t = 1; t <= 48; ++t) v[t - 1] = (t % 4) * 1.0;
  for (double f : fmax_profile(v, 4)) CHECK(f == doctest::Approx(0.0));
}

TEST_CASE("variance change in residuals") {
  const int n = 200;
  SplitMix64 rng(17);
  std::vector<double> r(n), mu(n, 0.0);
  for (int t = 1; t <= n; ++t) r[t - 1] = rng.normal(0.0, t <= n / 2 ? 1.0 : 0.1);
  auto res = variance_amoc(r, mu);
  CHECK(res.reject);
  CHECK(res.location >= n / 2 - 10);
  CHECK(res.location <= n / 2 + 10);

  std::vector<double> rev(r.rbegin(), r.rend());
  for (int tau = 3; tau <= n - 1; tau += 13)
    CHECK(variance_loglik(r, tau) == doctest::Approx(variance_loglik(rev, n + 2 - tau)));

  std::vector<double> flat(20);
  for (int t = 0; t < 20; ++t) flat[t] = t % 2 ? 1.0 : -1.0;
  CHECK(variance_loglik(flat, 5) == doctest::Approx(variance_loglik(flat, 11)));
}
