#include <cmath>
#include <sstream>

#include <doctest.h>

#include "changeforge/genlasso.hpp"
#include "changeforge/models.hpp"
#include "oracles.hpp"

using namespace changeforge;

namespace {

SparseRowMatrix dense_to_sparse(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd M(rows.size(), rows.begin()->size());
  int i = 0;
  for (auto r : rows) {
    int j = 0;
    for (double v : r) M(i, j++) = v;
    ++i;
  }
  return to_sparse(M);
}

}  // namespace

TEST_CASE("two-point fused lasso by hand") {
  Eigen::VectorXd y(2);
  y << 0, 1;
  auto D = dense_to_sparse({{-1, 1}});
  auto path = solve_dual_path(y, D);
  REQUIRE(path.nodes.size() == 1);
  CHECK(path.nodes[0].lambda == doctest::Approx(0.5));
  CHECK(path.nodes[0].event == PathEvent::hit);
  auto above = coefficients_at_lambda(path, 0.8);
  CHECK(above(0) == doctest::Approx(0.5));
  CHECK(above(1) == doctest::Approx(0.5));
  auto q = coefficients_at_lambda(path, 0.25);
  CHECK(q(0) == doctest::Approx(0.25));
  CHECK(q(1) == doctest::Approx(0.75));
  auto at = coefficients_at_lambda(path, path.nodes[0].lambda);
  CHECK((at - path.nodes[0].primal).norm() == doctest::Approx(0.0));
  CHECK((path.terminal.primal - y).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("primal from dual") {
  Eigen::VectorXd y(2);
  y << 0, 1;
  auto D = dense_to_sparse({{-1, 1}});
  Eigen::VectorXd nu(1);
  nu << 0.5;
  auto mu = primal_from_dual(y, D, nu);
  CHECK(mu(0) == doctest::Approx(0.5));
  CHECK(mu(1) == doctest::Approx(0.5));
  CHECK(primal_from_dual(y, D, Eigen::VectorXd::Zero(1)) == y);

  SplitMix64 rng(3);
  Eigen::VectorXd y5 = oracle::to_eigen(oracle::gaussian(rng, 5));
  auto D5 = first_difference_matrix(5);
  Eigen::VectorXd n1 = oracle::to_eigen(oracle::gaussian(rng, 4)), n2 = oracle::to_eigen(oracle::gaussian(rng, 4));
  Eigen::VectorXd lhs = primal_from_dual(y5, D5, n1 + n2);
  Eigen::VectorXd rhs = primal_from_dual(y5, D5, n1) + primal_from_dual(Eigen::VectorXd::Zero(5), D5, n2);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("identity penalty gives soft thresholding") {
  SplitMix64 rng(21);
  Eigen::VectorXd y = oracle::to_eigen(oracle::gaussian(rng, 12, 2.0));
  SparseRowMatrix I(12, 12);
  I.setIdentity();
  auto path = solve_dual_path(y, I);
  for (double lam : {0.0, 0.1, 0.7, 1.5, 3.0, 10.0}) {
    auto mu = coefficients_at_lambda(path, lam);
    for (int i = 0; i < 12; ++i) {
      double st = std::copysign(std::max(0.0, std::abs(y(i)) - lam), y(i));
      CHECK(mu(i) == doctest::Approx(st).epsilon(1e-10));
    }
  }
}

TEST_CASE("first-difference path hits every row once") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    auto rng = SplitMix64::stream(s, 6);
    int n = 10 + static_cast<int>(s * 7);
    Eigen::VectorXd y = oracle::to_eigen(oracle::gaussian(rng, n));
    auto path = solve_dual_path(y, first_difference_matrix(n));
    CHECK(path.nodes.size() == static_cast<std::size_t>(n - 1));
    for (const auto& nd : path.nodes) CHECK(nd.event == PathEvent::hit);
    for (std::size_t k = 1; k < path.nodes.size(); ++k) CHECK(path.nodes[k].lambda <= path.nodes[k - 1].lambda);
  }
}

TEST_CASE("KKT conditions hold at nodes and between them") {
  for (std::uint64_t s = 1; s <= 12; ++s) {
    auto rng = SplitMix64::stream(s, 7);
    int n = 8 + static_cast<int>(s % 5) * 6;
    Eigen::VectorXd y = oracle::to_eigen(oracle::gaussian(rng, n));
    SparseRowMatrix D = s % 3 == 0 ? second_difference_matrix(n) : first_difference_matrix(n);
    if (s % 4 == 1) {
      Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n / 2, n);
      for (int i = 0; i < n / 2; ++i) {
        R(i, rng.uniform_int(0, n - 1)) += 1.0;
        R(i, rng.uniform_int(0, n - 1)) -= rng.uniform(0.5, 2.0);
      }
      for (int i = 0; i < n / 2; ++i)
        if (R.row(i).norm() == 0.0) R(i, i) = 1.0;
      D = to_sparse(R);
    }
    auto path = solve_dual_path(y, D);
    for (const auto& nd : path.nodes) CHECK(oracle::kkt_violation(y, D, nd.dual, nd.lambda, 1e-7) < 1e-8);
    double top = path.first_knot();
    for (int k = 1; k <= 20; ++k) {
      double lam = top * k / 21.0;
      CHECK(oracle::kkt_violation(y, D, dual_at_lambda(path, lam), lam, 1e-7) < 1e-8);
    }
  }
}

TEST_CASE("path objective matches the dual box oracle") {
  for (std::uint64_t s = 1; s <= 15; ++s) {
    auto rng = SplitMix64::stream(s, 8);
    int n = 5 + static_cast<int>(s % 20);
    Eigen::VectorXd y = oracle::to_eigen(oracle::gaussian(rng, n));
    SparseRowMatrix D = s % 2 ? first_difference_matrix(n) : second_difference_matrix(n);
    auto path = solve_dual_path(y, D);
    double lam = rng.uniform(0.05, 1.2) * path.first_knot();
    auto mu = coefficients_at_lambda(path, lam);
    auto ref = oracle::dual_box_cd(y, D, lam);
    CHECK(oracle::genlasso_objective(y, D, mu, lam) ==
          doctest::Approx(oracle::genlasso_objective(y, D, ref, lam)).epsilon(1e-7));
  }
}

TEST_CASE("rank-deficient penalty takes the pseudo-inverse route") {
  SplitMix64 rng(31);
  int n = 8;
  Eigen::VectorXd y = oracle::to_eigen(oracle::gaussian(rng, n));
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n - 3, n);
  auto D1 = Eigen::MatrixXd(first_difference_matrix(n));
  auto D2 = Eigen::MatrixXd(second_difference_matrix(n));
  M << D1, D2;
  auto D = to_sparse(M);
  auto path = solve_dual_path(y, D);
  CHECK(path.rank_deficient);
  for (double f : {0.1, 0.4, 0.8}) {
    double lam = f * path.first_knot();
    auto mu = coefficients_at_lambda(path, lam);
    auto ref = oracle::dual_box_cd(y, D, lam);
    CHECK(oracle::genlasso_objective(y, D, mu, lam) ==
          doctest::Approx(oracle::genlasso_objective(y, D, ref, lam)).epsilon(1e-7));
  }
}

TEST_CASE("lambda above the first knot gives the fused fit") {
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 6;
  auto path = solve_dual_path(y, first_difference_matrix(4));
  auto mu = coefficients_at_lambda(path, 10 * path.first_knot());
  for (int i = 0; i < 4; ++i) CHECK(mu(i) == doctest::Approx(3.0));
}

TEST_CASE("bad inputs are rejected") {
  Eigen::VectorXd y(3);
  y << 1, 2, std::nan("");
  CHECK_THROWS_AS(solve_dual_path(y, first_difference_matrix(3)), std::invalid_argument);
  Eigen::VectorXd y2(3);
  y2 << 1, 2, 3;
  CHECK_THROWS_AS(solve_dual_path(y2, first_difference_matrix(4)), std::invalid_argument);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(3, 3);
  CHECK_THROWS_AS(absorb_design(X, first_difference_matrix(3)), std::domain_error);
}

TEST_CASE("absorbing an identity design changes nothing") {
  auto D = first_difference_matrix(6);
  auto a = absorb_design(Eigen::MatrixXd::Identity(6, 6), D);
  CHECK((Eigen::MatrixXd(a.D) - Eigen::MatrixXd(D)).norm() < 1e-14);
  CHECK((a.X_inv - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-14);
}

TEST_CASE("absorbed AR(1) design has a free lag column") {
  std::vector<double> y{0.3, -1.2, 0.8, 2.0, 1.1};
  ModelParams mp;
  mp.y = y;
  auto spec = build_model(ModelFamily::ar1_mean_shift, 5, mp);
  auto a = absorb_design(spec.X, spec.D);
  Eigen::MatrixXd G = Eigen::MatrixXd(a.D) * spec.X;  // D X^-1 X = D
  CHECK((G - Eigen::MatrixXd(spec.D)).norm() < 1e-12);
  // In coefficient space the lag column carries no penalty.
  CHECK(Eigen::MatrixXd(spec.D).col(0).norm() == 0.0);
  // Explicit inverse oracle.
  Eigen::MatrixXd Xinv = spec.X.inverse();
  CHECK((a.X_inv - Xinv).norm() < 1e-12);
}

TEST_CASE("fused lasso as a lasso on increments") {
  const int n = 15;
  SplitMix64 rng(44);
  Eigen::VectorXd y = oracle::to_eigen(oracle::gaussian(rng, n));
  for (int i = 7; i < n; ++i) y(i) += 2.0;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) X(i, j) = 1.0;
  Eigen::MatrixXd Dm = Eigen::MatrixXd::Zero(n - 1, n);
  for (int i = 1; i < n; ++i) Dm(i - 1, i) = 1.0;
  auto a = absorb_design(X, to_sparse(Dm));
  auto inc = solve_dual_path(y, a.D);
  auto tv = solve_dual_path(y, first_difference_matrix(n));
  REQUIRE(inc.nodes.size() == tv.nodes.size());
  for (double f : {0.05, 0.3, 0.6, 0.95}) {
    double lam = f * tv.first_knot();
    CHECK((coefficients_at_lambda(inc, lam) - coefficients_at_lambda(tv, lam)).norm() < 1e-8);
  }
}

TEST_CASE("path dump lists every knot") {
  Eigen::VectorXd y(4);
  y << 0, 1, 0, 1;
  auto path = solve_dual_path(y, first_difference_matrix(4));
  std::ostringstream os;
  write_path(os, path);
  int lines = 0;
  std::string line;
  std::istringstream is(os.str());
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 1 + static_cast<int>(path.nodes.size()) + 1);
}
