#include "changeforge/irfl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace changeforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double variance(const Eigen::VectorXd& y) {
  if (y.size() < 2) return 0.0;
  double m = y.mean();
  return (y.array() - m).square().sum() / static_cast<double>(y.size() - 1);
}

struct Candidate {
  double lambda;
  const Eigen::VectorXd* theta;
};

}  // namespace

void validate(const IrflConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("IRFL epsilon must be positive");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("IRFL tolerance must be positive");
  if (cfg.max_iterations < 1) throw std::invalid_argument("IRFL needs at least one iteration");
  if (!(cfg.zero_tolerance > 0.0)) throw std::invalid_argument("IRFL zero tolerance must be positive");
  if (!(cfg.max_active_fraction > 0.0 && cfg.max_active_fraction <= 1.0))
    throw std::invalid_argument("IRFL max_active_fraction must lie in (0, 1]");
}

const IrflIteration& IrflTrace::final() const {
  for (auto it = iterations.rbegin(); it != iterations.rend(); ++it)
    if (it->accepted) return *it;
  throw std::logic_error("IRFL trace has no accepted iteration");
}

double sse_floor(const Eigen::VectorXd& y) { return static_cast<double>(y.size()) * 1e-12 * variance(y) + 1e-300; }

double model_bic(double sse, int n, int m, double var_y) {
  if (n < 1) throw std::invalid_argument("BIC needs n >= 1");
  double floor = n * 1e-12 * var_y + 1e-300;
  double s = std::max(sse, floor);
  return n * std::log(s / n) + m * std::log(static_cast<double>(n));
}

std::vector<int> nonzero_rows(const Eigen::VectorXd& contrast, double zero_tol, double y_scale) {
  double big = contrast.size() ? contrast.cwiseAbs().maxCoeff() : 0.0;
  double thr = zero_tol * std::max(big, y_scale);
  std::vector<int> rows;
  for (int j = 0; j < contrast.size(); ++j)
    if (std::abs(contrast(j)) > thr) rows.push_back(j);
  return rows;
}

Eigen::VectorXd reweight(const Eigen::VectorXd& contrast, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("IRFL epsilon must be positive");
  return (contrast.cwiseAbs().array() + epsilon).inverse().matrix();
}

IrflRun run_irfl(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const SparseRowMatrix& D0,
                 const IrflConfig& cfg) {
  if (X.rows() != y.size()) throw std::invalid_argument("design rows must match the series length");
  return run_irfl(y, absorb_design(X, D0), cfg);
}

IrflRun run_irfl(const Eigen::VectorXd& y, const AbsorbedDesign& design, const IrflConfig& cfg) {
  validate(cfg);
  const SparseRowMatrix& G = design.D;
  int n = static_cast<int>(y.size());
  if (G.cols() != n) throw std::invalid_argument("structure matrix width must match the series length");
  double var_y = variance(y);
  double y_scale = y.size() ? y.cwiseAbs().maxCoeff() : 0.0;

  IrflRun run;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(G.rows());
  run.trace.iterations.reserve(static_cast<std::size_t>(cfg.max_iterations));
  const IrflIteration* best = nullptr;  // stable: capacity is reserved
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    SparseRowMatrix Dw = w.asDiagonal() * G;
    SolutionPath path = solve_dual_path(y, Dw);

    std::vector<Candidate> cands{{kInf, &path.init_primal}};
    for (const auto& nd : path.nodes) cands.push_back({nd.lambda, &nd.primal});
    cands.push_back({path.terminal.lambda, &path.terminal.primal});

    IrflIteration rec;
    rec.iteration = it;
    rec.weights = w;
    rec.bic = kInf;
    const Eigen::VectorXd* pick = nullptr;
    auto cap = static_cast<std::size_t>(cfg.max_active_fraction * static_cast<double>(G.rows()));
    // Candidates come in decreasing lambda, so a tie keeps the larger lambda.
    for (const auto& c : cands) {
      Eigen::VectorXd contrast = G * (*c.theta);
      auto rows = nonzero_rows(contrast, cfg.zero_tolerance, y_scale);
      if (rows.size() > cap) continue;
      double sse = (y - *c.theta).squaredNorm();
      double bic = model_bic(sse, n, static_cast<int>(rows.size()), var_y);
      double slack = 1e-10 * std::max(1.0, std::abs(rec.bic));
      if (pick == nullptr || bic < rec.bic - slack) {
        pick = c.theta;
        rec.bic = bic;
        rec.sse = sse;
        rec.lambda = c.lambda;
        rec.change_rows = std::move(rows);
      }
    }
    rec.m_hat = static_cast<int>(rec.change_rows.size());
    rec.fitted = *pick;
    rec.beta = design.X_inv * rec.fitted;
    Eigen::VectorXd contrast = G * rec.fitted;

    if (best && rec.bic > best->bic) {
      rec.accepted = false;
      run.trace.iterations.push_back(std::move(rec));
      break;
    }
    double prev = best ? best->bic : kInf;
    run.trace.iterations.push_back(std::move(rec));
    best = &run.trace.iterations.back();
    if (std::abs(best->bic - prev) <= cfg.tol) break;
    w = reweight(contrast, cfg.epsilon);
  }

  const IrflIteration& fin = run.trace.final();
  run.beta = fin.beta;
  run.fitted = fin.fitted;
  run.change_rows = fin.change_rows;
  run.bic = fin.bic;
  run.sse = fin.sse;
  return run;
}

void write_trace(std::ostream& os, const IrflTrace& trace) {
  os << "iteration\tlambda\tbic\tm_hat\taccepted\n";
  for (const auto& r : trace.iterations)
    os << r.iteration << '\t' << r.lambda << '\t' << r.bic << '\t' << r.m_hat << '\t' << (r.accepted ? 1 : 0) << '\n';
}

}  // namespace changeforge
