#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <doctest.h>

#include "changeforge/models.hpp"
#include "oracles.hpp"

using namespace changeforge;

namespace {

std::vector<double> ar1_noise(SplitMix64& rng, int n, double phi) {
  std::vector<double> e(n);
  double prev = rng.normal() / std::sqrt(1 - phi * phi);
  e[0] = prev;
  for (int t = 1; t < n; ++t) e[t] = prev = phi * prev + rng.normal();
  return e;
}

}  // namespace

TEST_CASE("mean shift design") {
  auto s = build_model(ModelFamily::mean_shift, 4);
  CHECK(s.X == Eigen::MatrixXd::Identity(4, 4));
  CHECK(Eigen::MatrixXd(s.D) == Eigen::MatrixXd(first_difference_matrix(4)));
  CHECK(s.row_to_tau(0) == 2);
  CHECK(s.tau_to_row(4) == 2);
}

TEST_CASE("seasonal design matches the p = 7, n = 21 display") {
  const int p = 7, n = 21;
  ModelParams mp;
  mp.period = p;
  auto s = build_model(ModelFamily::seasonal, n, mp);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (i % p < p - 1)
      X(i, i % p) = 1.0;
    else
      X.row(i).head(p - 1).setConstant(-1.0);
    X(i, i < p ? p - 1 : i) = 1.0;
  }
  CHECK(s.X == X);
  CHECK(s.D.rows() == n - p);
  CHECK(s.D.cols() == n);
  Eigen::MatrixXd D(s.D);
  CHECK(D.leftCols(p - 1).norm() == 0.0);
  CHECK(D(0, p - 1) == -1.0);
  CHECK(D(0, p) == 1.0);
  CHECK(s.prefuse == p);
  CHECK(s.labels.front() == "s1");
}

TEST_CASE("Mauna Loa design dimensions and pre-fuse width") {
  auto s = build_model(ModelFamily::quad_seasonal, 768);
  CHECK(s.X.rows() == 768);
  CHECK(s.X.cols() == 768);
  CHECK(s.D.rows() == 754);
  CHECK(s.D.cols() == 768);
  CHECK(s.prefuse == 14);
}

TEST_CASE("global columns are exactly the zero columns of D") {
  SplitMix64 rng(2);
  auto y = oracle::gaussian(rng, 60);
  for (auto f : {ModelFamily::mean_shift, ModelFamily::ar1_mean_shift, ModelFamily::fixed_trend, ModelFamily::trend_shift,
                 ModelFamily::seasonal, ModelFamily::seasonal_trend, ModelFamily::quad_seasonal}) {
    ModelParams mp;
    mp.y = y;
    auto s = build_model(f, 60, mp);
    Eigen::MatrixXd D(s.D);
    std::vector<int> zero;
    for (int j = 0; j < 60; ++j)
      if (D.col(j).norm() == 0.0) zero.push_back(j);
    CHECK(zero == s.global_columns);
    CHECK(design_rcond(s.X) > 1e-12);
    CHECK(static_cast<int>(s.labels.size()) == 60);
  }
}

TEST_CASE("designs stay invertible at n = 2000") {
  for (auto f : {ModelFamily::fixed_trend, ModelFamily::seasonal_trend, ModelFamily::quad_seasonal})
    CHECK(design_rcond(build_model(f, 2000).X) > 1e-12);
}

TEST_CASE("model construction errors") {
  ModelParams mp;
  mp.period = 12;
  CHECK_THROWS(build_model(ModelFamily::seasonal, 12, mp));
  CHECK_THROWS(build_model(ModelFamily::ar1_mean_shift, 10));  // needs the series
  CHECK_THROWS(parse_family("cubic_shift"));
  CHECK(parse_family("quad_seasonal") == ModelFamily::quad_seasonal);
}

TEST_CASE("IRFL reproduces noiseless seasonal components") {
  const int p = 12, n = 96;
  std::vector<double> v(n);
  std::vector<double> s(p);
  for (int j = 0; j < p; ++j) s[j] = 1.5 * std::sin(2 * std::numbers::pi * (j + 1) / p);
  for (int t = 1; t <= n; ++t) v[t - 1] = 4.0 + s[(t - 1) % p];
  auto spec = build_model(ModelFamily::seasonal, n);
  auto run = run_irfl(oracle::to_eigen(v), spec.X, spec.D);
  CHECK(run.change_rows.empty());
  double total = 0.0;
  for (int j = 0; j < p - 1; ++j) {
    CHECK(run.beta(j) == doctest::Approx(s[j]).epsilon(1e-8));
    total += run.beta(j);
  }
  CHECK(std::abs(total + s[p - 1]) < 1e-8);
}

TEST_CASE("AR(1) correlation") {
  CHECK(ar1_correlation(0.0, 4) == Eigen::MatrixXd::Identity(4, 4));
  Eigen::Matrix3d R;
  R << 1, .5, .25, .5, 1, .5, .25, .5, 1;
  CHECK((ar1_correlation(0.5, 3) - R).norm() < 1e-15);
  for (int n = 1; n <= 8; ++n)
    for (double phi : {-0.8, -0.3, 0.0, 0.4, 0.9}) {
      double direct = std::log(ar1_correlation(phi, n).determinant());
      CHECK(ar1_log_det(phi, n) == doctest::Approx(direct).epsilon(1e-10));
    }
  CHECK_THROWS(ar1_correlation(1.0, 3));
  CHECK_THROWS(prewhiten(Eigen::VectorXd(Eigen::VectorXd::Ones(3)), -1.0));
}

TEST_CASE("prewhitening") {
  Eigen::MatrixXd L(prewhitening_matrix(0.7, 6));
  Eigen::MatrixXd C = L * ar1_correlation(0.7, 6) * L.transpose();
  CHECK((C - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);

  Eigen::VectorXd y(5);
  y << 1, -2, 0.5, 3, 1;
  CHECK(prewhiten(y, 0.0) == y);
  auto w = prewhiten(y, 0.6);
  CHECK(w(0) == doctest::Approx(y(0)));
  for (int t = 1; t < 5; ++t) CHECK(w(t) == doctest::Approx((y(t) - 0.6 * y(t - 1)) / std::sqrt(1 - 0.36)));
}

TEST_CASE("BIC with an AR(1) term") {
  CHECK(bic_phi(11.0, 11, 0, 0.5) == doctest::Approx(10 * std::log(0.75)));
  CHECK(bic_phi(11.0, 11, 0, 0.5) == doctest::Approx(-2.8768).epsilon(1e-4));
  CHECK(bic_phi(5.0, 20, 3, 0.0) == doctest::Approx(20 * std::log(0.25) + 3 * std::log(20.0)));
  double prev = bic_phi(30.0, 30, 2, 0.0);
  for (double phi : {0.2, 0.4, 0.6, 0.8}) {
    double b = bic_phi(30.0, 30, 2, phi);
    CHECK(b < prev);
    prev = b;
  }
  CHECK_THROWS(bic_phi(0.0, 10, 1, 0.1));
}

TEST_CASE("constrained refit of a noiseless level shift") {
  std::vector<double> v(40, 1.0);
  for (int t = 21; t <= 40; ++t) v[t - 1] = 3.0;
  auto spec = build_model(ModelFamily::mean_shift, 40);
  auto fit = refit_changepoints(spec, oracle::to_eigen(v), {spec.tau_to_row(21)});
  CHECK(fit.sse_phi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.fitted(0) == doctest::Approx(1.0));
  CHECK(fit.fitted(39) == doctest::Approx(3.0));
}

TEST_CASE("phi grid search") {
  const int n = 200;
  SplitMix64 rng(9);
  auto e = ar1_noise(rng, n, 0.6);
  std::vector<double> y(n);
  for (int t = 1; t <= n; ++t) y[t - 1] = (t > 100 ? 3.0 : 0.0) + e[t - 1];
  ModelParams mp;
  mp.y = y;
  auto spec = build_model(ModelFamily::mean_shift, n, mp);
  Eigen::VectorXd yv = oracle::to_eigen(y);

  auto zero = phi_grid_search(spec, yv, {0.0}, {}, 0);
  auto plain = run_irfl(yv, spec.X, spec.D);
  CHECK(zero.phi == 0.0);
  CHECK(zero.rows == plain.change_rows);

  auto res = phi_grid_search(spec, yv, default_phi_grid());
  CHECK(res.bic <= res.bic_before_refinement + 1e-9);
  CHECK(res.grid.size() == default_phi_grid().size());
  CHECK(std::abs(res.phi - 0.6) <= 0.1);
  CHECK_THROWS(phi_grid_search(spec, yv, {}));
  CHECK_THROWS(phi_grid_search(spec, yv, {1.0}));

  // Never worse than the oracle fit at the true changepoint.
  auto truth = oracle_phi_fit(spec, yv, {spec.tau_to_row(101)}, default_phi_grid());
  CHECK(res.bic <= truth.bic + 1e-9);
}

TEST_CASE("NOAA monthly reader") {
  std::string path = "noaa_test.csv";
  {
    std::ofstream os(path);
    os << "# comment\n# more\nyear,month,decimal date,average,deseasonalized\n"
       << "1958,3,1958.2027,315.70,314.43\n1958,4,1958.2877,317.45,315.16\n";
  }
  auto m = read_noaa_monthly(path);
  REQUIRE(m.value.size() == 2);
  CHECK(m.year[1] == 1958);
  CHECK(m.month[1] == 4);
  CHECK(m.value[0] == doctest::Approx(315.70));
  {
    std::ofstream os(path);
    os << "year,month,decimal date,average\n1958,3,1958.2,315.7\n1958,4,1958.3,-99.99\n";
  }
  CHECK_THROWS_WITH_AS(read_noaa_monthly(path), doctest::Contains("-99.99"), std::runtime_error);
  std::remove(path.c_str());
}
