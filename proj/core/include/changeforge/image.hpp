#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "changeforge/genlasso.hpp"
#include "changeforge/irfl.hpp"

namespace changeforge {

// R x C intensities; Y(r, c) with 0-based indices.
struct GridImage {
  Eigen::MatrixXd Y;
  int rows() const { return static_cast<int>(Y.rows()); }
  int cols() const { return static_cast<int>(Y.cols()); }
};

// y_{(c-1)R + r} = Y_rc
Eigen::VectorXd vectorize_column_major(const GridImage& img);
GridImage devectorize_column_major(const Eigen::VectorXd& y, int rows, int cols);

// Vertical block (adjacent pixels within a column, column by column) stacked
// over the horizontal block (pixels R apart in the vector).
SparseRowMatrix grid_difference_matrix(int rows, int cols);

struct AdmmConfig {
  double rho = 1.0;
  int max_iter = 500;
  double primal_tol = 1e-5;  // ||D mu - z||_2
  double dual_tol = 1e-5;    // rho ||D^T (z - z_prev)||_2
};

struct AdmmResult {
  Eigen::VectorXd mu;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  std::vector<double> objective;  // 1/2||y - mu||^2 + lambda ||D mu||_1 per iteration
};

double soft_threshold(double a, double delta);

// Scaled-form ADMM for min 1/2||y - mu||^2 + lambda ||D mu||_1.
AdmmResult tv_admm(const Eigen::VectorXd& y, const SparseRowMatrix& D, double lambda, const AdmmConfig& cfg = {});

struct Irfl2dStack {
  double lambda = 0.0;
  std::vector<Eigen::VectorXd> iterates;  // mu^(1..N)
  std::vector<AdmmResult> solves;         // diagnostics, iterate fields emptied
};

// For each lambda, N = cfg.max_iterations reweighted solves starting from unit weights.
std::vector<Irfl2dStack> irfl_2d(const GridImage& img, const std::vector<double>& lambdas, const IrflConfig& cfg,
                                 const AdmmConfig& admm = {});

struct Pixel {
  int r = 0, c = 0;
  bool operator==(const Pixel&) const = default;
};

struct EdgeSet {
  std::vector<int> rows;                         // rows of D0 above tol
  std::vector<std::pair<Pixel, Pixel>> pixels;   // the two pixels each row compares
};

EdgeSet edge_set(const Eigen::VectorXd& mu_hat, int rows, int cols, double tol);
std::pair<Pixel, Pixel> edge_pixels(int row, int rows, int cols);

// Binary PGM (P5); values are v / maxval on read, round(255 clamp(v)) on write.
GridImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GridImage& img);

using Rgb = std::array<std::uint8_t, 3>;
using Palette = std::map<int, Rgb>;

// 1 green, 2 blue, 3 purple, 4 red.
Palette default_palette();
Palette read_palette(const std::string& path);  // lines "index r g b"
void write_palette(const std::string& path, const Palette& pal);

// Binary PPM (P6) of palette indices; colours absent from the palette are an error on read.
void write_ppm_indexed(const std::string& path, const GridImage& indices, const Palette& pal);
GridImage read_ppm_indexed(const std::string& path, const Palette& pal);

// Greyscale image with the lower-index pixel of every edge painted pure red.
void write_edge_overlay(const std::string& path, const GridImage& img, const EdgeSet& edges);

}  // namespace changeforge
