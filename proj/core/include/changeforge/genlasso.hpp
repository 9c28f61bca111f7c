#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

namespace changeforge {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class PathEvent { init, hit, leave, terminal };

const char* to_string(PathEvent e);

struct PathNode {
  double lambda = 0.0;
  PathEvent event = PathEvent::hit;
  int index = -1;               // row of D that hit or left (0-based)
  std::vector<int> boundary;    // sorted rows with |nu_i| = lambda
  std::vector<int> signs;       // aligned with boundary
  Eigen::VectorXd dual;
  Eigen::VectorXd primal;
};

struct SolutionPath {
  Eigen::VectorXd y;
  SparseRowMatrix D;
  Eigen::VectorXd init_dual;     // (D D^T)^+ D y, the lambda = infinity dual
  Eigen::VectorXd init_primal;   // fully fused fit
  std::vector<PathNode> nodes;   // hit and leave knots, strictly decreasing lambda
  PathNode terminal;             // at lambda_min (or 0)
  bool rank_deficient = false;

  double first_knot() const { return nodes.empty() ? terminal.lambda : nodes.front().lambda; }
};

struct PathOptions {
  double lambda_min = 0.0;
  int max_steps = -1;       // < 0: no cap beyond 4 * rows + 10
  double pinv_tol = 1e-10;  // relative to the largest singular value
};

// Dual path for min 1/2 ||y - mu||^2 + lambda ||D mu||_1.
SolutionPath solve_dual_path(const Eigen::VectorXd& y, const SparseRowMatrix& D, const PathOptions& opt = {});

Eigen::VectorXd primal_from_dual(const Eigen::VectorXd& y, const SparseRowMatrix& D, const Eigen::VectorXd& nu);

Eigen::VectorXd dual_at_lambda(const SolutionPath& path, double lambda);
Eigen::VectorXd coefficients_at_lambda(const SolutionPath& path, double lambda);

struct AbsorbedDesign {
  SparseRowMatrix D;       // D X^{-1}
  Eigen::MatrixXd X_inv;
  double rcond = 1.0;
};

// Reduces min 1/2||y - X b||^2 + lambda||D b||_1 with square invertible X to
// the signal form in theta = X b.
AbsorbedDesign absorb_design(const Eigen::MatrixXd& X, const SparseRowMatrix& D);

// Tab-separated: lambda, event, index, boundary indices (comma list), ||D mu||_0.
void write_path(std::ostream& os, const SolutionPath& path, double zero_tol = 1e-8);

// Helpers shared with tests and the 2D module.
SparseRowMatrix first_difference_matrix(int n);
SparseRowMatrix second_difference_matrix(int n);
SparseRowMatrix to_sparse(const Eigen::MatrixXd& M, double drop_tol = 0.0);

}  // namespace changeforge
