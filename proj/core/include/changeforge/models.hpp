#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "changeforge/genlasso.hpp"
#include "changeforge/irfl.hpp"
#include "changeforge/series.hpp"

namespace changeforge {

enum class ModelFamily { mean_shift, ar1_mean_shift, fixed_trend, trend_shift, seasonal, seasonal_trend, quad_seasonal };

const char* to_string(ModelFamily f);
ModelFamily parse_family(const std::string& token);

struct ModelParams {
  int period = 12;
  std::vector<double> y;  // needed by ar1_mean_shift for the lag column
};

struct ModelSpec {
  ModelFamily family = ModelFamily::mean_shift;
  Eigen::MatrixXd X;
  SparseRowMatrix D;
  std::vector<std::string> labels;
  int period = 0;
  int prefuse = 1;          // observations sharing mu_1
  int mu_offset = 0;        // first column carrying a segment level (0-based)
  int diff_order = 1;       // 1: level shifts, 2: slope changes
  std::vector<int> global_columns;  // exactly the zero columns of D

  int n() const { return static_cast<int>(X.rows()); }
  // Changepoint (first index of the new regime, origin-1) opened by D row j (0-based).
  int row_to_tau(int row) const;
  int tau_to_row(int tau) const;
  ChangepointVector taus(const std::vector<int>& rows) const;
};

ModelSpec build_model(ModelFamily family, int n, const ModelParams& params = {});

// Reciprocal condition number of X after column equilibration.
double design_rcond(const Eigen::MatrixXd& X);

// [R]_ij = phi^|i - j|
Eigen::MatrixXd ar1_correlation(double phi, int n);
// (n - 1) log(1 - phi^2)
double ar1_log_det(double phi, int n);

// L with L R L^T = I: L_11 = 1, and for t >= 2 row t is (y_t - phi y_{t-1}) / sqrt(1 - phi^2).
SparseRowMatrix prewhitening_matrix(double phi, int n);
Eigen::VectorXd prewhiten(const Eigen::VectorXd& y, double phi);
Eigen::MatrixXd prewhiten(const Eigen::MatrixXd& X, double phi);

// n log(SSE/n) + k log n + (n - 1) log(1 - phi^2)
double bic_phi(double sse_phi, int n, int k, double phi);

// Number of D-free parameters plus one level per segment.
int effective_parameters(const ModelSpec& spec, int m_hat);

// Unpenalised GLS refit with the given D rows free and every other row fused.
struct ConstrainedFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd fitted;       // X beta on the original scale
  double sse_phi = 0.0;         // whitened residual sum of squares
  double sigma2 = 0.0;          // sse_phi / (n - k)
  Eigen::MatrixXd global_cov;   // covariance of the global coefficients, in global_columns order
  int k = 0;
};

ConstrainedFit refit_changepoints(const ModelSpec& spec, const Eigen::VectorXd& y, const std::vector<int>& rows,
                                  double phi = 0.0);

struct PhiCandidate {
  double phi = 0.0;
  double bic = 0.0;
  int m_hat = 0;
  int iteration = 0;
};

struct PhiSearchResult {
  double phi = 0.0;
  double bic = 0.0;
  ChangepointVector taus;
  std::vector<int> rows;
  Eigen::VectorXd beta;
  Eigen::VectorXd fitted;
  std::vector<PhiCandidate> grid;  // best candidate per phi, in grid order
  double bic_before_refinement = 0.0;
  int refinement_moves = 0;
};

std::vector<double> default_phi_grid();

// Prewhitens per phi, runs IRFL and scores every accepted iterate by BIC_phi.
// The best set of each phi then seeds a local search (drop a changepoint,
// shift one by up to +-radius indices, re-scan phi) that runs while BIC_phi
// improves; the overall best is returned.
PhiSearchResult phi_grid_search(const ModelSpec& spec, const Eigen::VectorXd& y, const std::vector<double>& grid,
                                const IrflConfig& cfg = {}, int radius = 12);

// Best BIC_phi over the grid for a fixed changepoint set.
PhiSearchResult oracle_phi_fit(const ModelSpec& spec, const Eigen::VectorXd& y, const std::vector<int>& rows,
                               const std::vector<double>& grid);

struct MonthlySeries {
  std::vector<int> year, month;
  std::vector<double> value;
};

// NOAA monthly file: '#' comments, then rows beginning year, month, ...; the
// value column is the first one after the decimal date when present.
MonthlySeries read_noaa_monthly(const std::string& path, int value_column = -1);

}  // namespace changeforge
