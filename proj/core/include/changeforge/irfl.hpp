#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "changeforge/genlasso.hpp"

namespace changeforge {

struct IrflConfig {
  double epsilon = 1e-8;
  double tol = 1e-6;
  int max_iterations = 20;
  // (D0 beta)_j counts as a change when it exceeds this fraction of
  // max(max_j |(D0 beta)_j|, max_t |y_t|).
  double zero_tolerance = 1e-7;
  // Path models with more than this fraction of D0's rows active are not
  // scored: near the saturated end SSE -> 0 and n log(SSE/n) swamps m log n.
  double max_active_fraction = 0.5;
};

void validate(const IrflConfig& cfg);

struct IrflIteration {
  int iteration = 0;
  double lambda = 0.0;  // +inf when the fully fused model won
  double bic = 0.0;
  double sse = 0.0;
  int m_hat = 0;
  std::vector<int> change_rows;  // 0-based rows of D0 with a nonzero contrast
  Eigen::VectorXd beta;
  Eigen::VectorXd fitted;        // X beta
  Eigen::VectorXd weights;       // the weights this iteration's path was run with
  bool accepted = true;
};

struct IrflTrace {
  std::vector<IrflIteration> iterations;
  // Last accepted record; the result of the run.
  const IrflIteration& final() const;
};

struct IrflRun {
  Eigen::VectorXd beta;
  Eigen::VectorXd fitted;
  std::vector<int> change_rows;
  double bic = 0.0;
  double sse = 0.0;
  IrflTrace trace;
};

// n log(max(SSE, floor)/n) + m log n, the floor being n 1e-12 var(y) + 1e-300.
double model_bic(double sse, int n, int m, double var_y = 0.0);
double sse_floor(const Eigen::VectorXd& y);

// Counts |(D0 beta)_j| above the configured zero tolerance.
std::vector<int> nonzero_rows(const Eigen::VectorXd& contrast, double zero_tol, double y_scale);

// w_j = 1 / (|(D0 beta)_j| + epsilon).
Eigen::VectorXd reweight(const Eigen::VectorXd& contrast, double epsilon);

// Minimises 1/2||y - X b||^2 + lambda ||W D0 b||_1 along the whole lambda path
// for each reweighting round. X must be square and invertible.
IrflRun run_irfl(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const SparseRowMatrix& D0,
                 const IrflConfig& cfg = {});

// Same, reusing an absorbed design (D0 X^{-1}, X^{-1}).
IrflRun run_irfl(const Eigen::VectorXd& y, const AbsorbedDesign& design, const IrflConfig& cfg = {});

// Tab-separated: iteration, lambda, bic, m_hat, accepted.
void write_trace(std::ostream& os, const IrflTrace& trace);

}  // namespace changeforge
