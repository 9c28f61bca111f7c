#include <cmath>
#include <cstdio>
#include <filesystem>

#include <doctest.h>

#include "changeforge/image.hpp"
#include "oracles.hpp"

using namespace changeforge;

namespace {

GridImage two_block(int R, int C, int split) {
  GridImage img{Eigen::MatrixXd::Zero(R, C)};
  img.Y.rightCols(C - split).setOnes();
  return img;
}

double block_variance(const Eigen::MatrixXd& M) {
  double m = M.mean();
  return (M.array() - m).square().mean();
}

}  // namespace

TEST_CASE("column-major vectorisation") {
  GridImage img{Eigen::Matrix2d{{1, 2}, {3, 4}}};
  Eigen::VectorXd v = vectorize_column_major(img);
  CHECK(v == Eigen::Vector4d(1, 3, 2, 4));
  CHECK(devectorize_column_major(v, 2, 2).Y == img.Y);
  GridImage col{Eigen::Vector3d(5, 6, 7)};
  CHECK(vectorize_column_major(col) == Eigen::Vector3d(5, 6, 7));
  CHECK_THROWS(devectorize_column_major(v, 3, 2));
}

TEST_CASE("grid difference matrix") {
  auto D = grid_difference_matrix(4, 4);
  CHECK(D.rows() == 24);
  CHECK(D.cols() == 16);
  Eigen::MatrixXd Dd(D);
  CHECK(Dd.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::MatrixXd(grid_difference_matrix(1, 7)) == Eigen::MatrixXd(first_difference_matrix(7)));
  // Vertical rows first, then horizontal rows R apart.
  CHECK(Dd(0, 0) == -1.0);
  CHECK(Dd(0, 1) == 1.0);
  CHECK(Dd(12, 0) == -1.0);
  CHECK(Dd(12, 4) == 1.0);
  CHECK(edge_pixels(0, 4, 4) == std::pair<Pixel, Pixel>{{0, 0}, {1, 0}});
  CHECK(edge_pixels(12, 4, 4) == std::pair<Pixel, Pixel>{{0, 0}, {0, 1}});
  CHECK_THROWS(edge_pixels(24, 4, 4));
}

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
}

TEST_CASE("ADMM trivial cases") {
  SplitMix64 rng(3);
  Eigen::VectorXd y = oracle::to_eigen(oracle::gaussian(rng, 20));
  auto D = grid_difference_matrix(4, 5);
  CHECK(tv_admm(y, D, 0.0).mu == y);
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(20, 0.3);
  auto r = tv_admm(flat, D, 2.0);
  CHECK((r.mu - flat).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(r.converged);
  CHECK_THROWS(tv_admm(y, D, -1.0));
  AdmmConfig bad;
  bad.rho = 0.0;
  CHECK_THROWS(tv_admm(y, D, 1.0, bad));
}

TEST_CASE("ADMM on a single-row image matches the 1D path") {
  SplitMix64 rng(11);
  AdmmConfig cfg;
  cfg.primal_tol = 1e-9;
  cfg.dual_tol = 1e-9;
  cfg.max_iter = 50000;
  for (int fixture = 0; fixture < 20; ++fixture) {
    int n = rng.uniform_int(5, 40);
    Eigen::VectorXd y = oracle::to_eigen(oracle::gaussian(rng, n));
    for (int t = n / 2; t < n; ++t) y(t) += 2.0;
    auto D = grid_difference_matrix(1, n);
    auto path = solve_dual_path(y, D);
    double lambda = rng.uniform(0.05, 3.0);
    Eigen::VectorXd ref = coefficients_at_lambda(path, lambda);
    auto r = tv_admm(y, D, lambda, cfg);
    CHECK(r.converged);
    CHECK(r.primal_residual <= cfg.primal_tol);
    CHECK(r.dual_residual <= cfg.dual_tol);
    CHECK((r.mu - ref).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("reweighted TV recovers a noiseless two-block image") {
  GridImage img = two_block(32, 32, 16);
  IrflConfig ic;
  ic.epsilon = 1e-3;
  ic.max_iterations = 4;
  AdmmConfig ac;
  ac.primal_tol = 1e-7;
  ac.dual_tol = 1e-7;
  ac.max_iter = 5000;
  auto stacks = irfl_2d(img, {0.5}, ic, ac);
  REQUIRE(stacks.size() == 1);
  REQUIRE(stacks[0].iterates.size() == 4);
  GridImage mu = devectorize_column_major(stacks[0].iterates[3], 32, 32);
  CHECK(block_variance(mu.Y.leftCols(16)) < 1e-6);
  CHECK(block_variance(mu.Y.rightCols(16)) < 1e-6);
  CHECK(mu.Y(0, 31) - mu.Y(0, 0) > 0.9);
  for (const auto& s : stacks[0].solves) CHECK(s.converged);
  auto edges = edge_set(stacks[0].iterates[3], 32, 32, 1e-3);
  CHECK(edges.rows.size() == 32);
  for (const auto& [a, b] : edges.pixels) {
    CHECK(a.c == 15);
    CHECK(b.c == 16);
  }
}

TEST_CASE("first reweighted iterate is plain TV") {
  SplitMix64 rng(5);
  GridImage img = two_block(6, 7, 3);
  img.Y.array() += 0.1 * Eigen::MatrixXd::NullaryExpr(6, 7, [&] { return rng.normal(); }).array();
  IrflConfig ic;
  ic.max_iterations = 2;
  auto st = irfl_2d(img, {0.2}, ic);
  auto plain = tv_admm(vectorize_column_major(img), grid_difference_matrix(6, 7), 0.2);
  CHECK((st[0].iterates[0] - plain.mu).cwiseAbs().maxCoeff() < 1e-12);

  auto zero = irfl_2d(img, {0.0}, ic);
  for (const auto& it : zero[0].iterates) CHECK(it == vectorize_column_major(img));
  CHECK_THROWS(irfl_2d(img, {}, ic));
}

TEST_CASE("edge sets") {
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(12, 0.5);
  CHECK(edge_set(flat, 3, 4, 1e-9).rows.empty());
  Eigen::VectorXd split = vectorize_column_major(two_block(5, 6, 2));
  CHECK(edge_set(split, 5, 6, 1e-9).rows.size() == 5);
  CHECK(edge_set(split, 5, 6, std::numeric_limits<double>::infinity()).rows.empty());
}

TEST_CASE("PGM and palette files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "changeforge_image_test";
  fs::create_directories(dir);
  std::string pgm = (dir / "z.pgm").string();
  write_pgm(pgm, GridImage{Eigen::MatrixXd::Zero(2, 2)});
  auto size = fs::file_size(pgm);
  CHECK(size >= 13);
  CHECK(size <= 17);

  GridImage img{Eigen::MatrixXd(3, 5)};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 5; ++c) img.Y(r, c) = (r * 5 + c) / 255.0;
  write_pgm(pgm, img);
  auto back = read_pgm(pgm);
  CHECK(back.rows() == 3);
  CHECK(back.cols() == 5);
  CHECK((back.Y - img.Y).cwiseAbs().maxCoeff() < 1e-12);

  std::string pal = (dir / "p.txt").string();
  write_palette(pal, default_palette());
  CHECK(read_palette(pal) == default_palette());

  GridImage idx{Eigen::MatrixXd{{1, 2}, {3, 4}}};
  std::string ppm = (dir / "i.ppm").string();
  write_ppm_indexed(ppm, idx, default_palette());
  CHECK(read_ppm_indexed(ppm, default_palette()).Y == idx.Y);
  GridImage bad{Eigen::MatrixXd::Constant(1, 1, 9)};
  CHECK_THROWS(write_ppm_indexed(ppm, bad, default_palette()));
  CHECK_THROWS(read_pgm(ppm));
  fs::remove_all(dir);
}
