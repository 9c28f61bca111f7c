#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "changeforge/genlasso.hpp"
#include "changeforge/rng.hpp"
#include "changeforge/series.hpp"

namespace oracle {

using changeforge::SparseRowMatrix;

// Every partial matching of est to truth, by recursion over est.
inline double brute_distance(const std::vector<int>& est, const std::vector<int>& truth, int n) {
  std::vector<bool> used(truth.size(), false);
  std::function<double(std::size_t)> go = [&](std::size_t i) -> double {
    if (i == est.size()) {
      double miss = 0.0;
      for (bool u : used) miss += u ? 0.0 : 1.0;
      return miss;
    }
    double best = 1.0 + go(i + 1);  // est[i] unmatched
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      best = std::min(best, std::abs(est[i] - truth[j]) / double(n) + go(i + 1));
      used[j] = false;
    }
    return best;
  };
  return go(0);
}

// Direct summation residual sum of squares on [s, e], origin-1.
inline double direct_rss(const std::vector<double>& y, int s, int e) {
  double m = 0.0;
  for (int t = s; t <= e; ++t) m += y[t - 1];
  m /= (e - s + 1);
  double r = 0.0;
  for (int t = s; t <= e; ++t) r += (y[t - 1] - m) * (y[t - 1] - m);
  return r;
}

inline double genlasso_objective(const Eigen::VectorXd& y, const SparseRowMatrix& D, const Eigen::VectorXd& mu,
                                 double lambda) {
  return 0.5 * (y - mu).squaredNorm() + lambda * (D * mu).cwiseAbs().sum();
}

// Fixed-lambda dual: min 1/2||y - D^T nu||^2 over ||nu||_inf <= lambda, by
// cyclic coordinate descent. Returns the primal y - D^T nu.
inline Eigen::VectorXd dual_box_cd(const Eigen::VectorXd& y, const SparseRowMatrix& D, double lambda,
                                   int max_sweeps = 200000, double tol = 1e-13) {
  Eigen::MatrixXd Dd(D);
  int m = static_cast<int>(Dd.rows());
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd r = y;  // y - D^T nu
  Eigen::VectorXd sq = Dd.rowwise().squaredNorm();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (int i = 0; i < m; ++i) {
      double g = Dd.row(i).dot(r);
      double v = std::clamp(nu(i) + g / sq(i), -lambda, lambda);
      double d = v - nu(i);
      if (d != 0.0) {
        r -= d * Dd.row(i).transpose();
        nu(i) = v;
        change = std::max(change, std::abs(d));
      }
    }
    if (change < tol) break;
  }
  return r;
}

// KKT residual for mu = y - D^T nu at lambda: box violation plus sign
// mismatch on rows where D mu is clearly nonzero.
inline double kkt_violation(const Eigen::VectorXd& y, const SparseRowMatrix& D, const Eigen::VectorXd& nu,
                            double lambda, double zero_tol) {
  Eigen::VectorXd mu = y - D.transpose() * nu;
  Eigen::VectorXd Dmu = D * mu;
  double scale = std::max(1.0, lambda);
  double worst = 0.0;
  for (int i = 0; i < nu.size(); ++i) {
    worst = std::max(worst, (std::abs(nu(i)) - lambda) / scale);
    if (std::abs(Dmu(i)) > zero_tol) worst = std::max(worst, std::abs(nu(i) - lambda * (Dmu(i) > 0 ? 1 : -1)) / scale);
  }
  return worst;
}

inline std::vector<double> gaussian(changeforge::SplitMix64& rng, int n, double sd = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0.0, sd);
  return v;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace oracle
