#include "changeforge/genlasso.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace changeforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Quantities of the current interior system. a and b are aligned with the
// interior list; mu_a and mu_b are the residuals after projecting out the
// row space of D_I.
struct StepTerms {
  Eigen::VectorXd a, b, mu_a, mu_b;
};

// Rotation taking (x, y) to (r, 0).
struct Rot {
  double c = 1.0, s = 0.0;
  Rot(double x, double y) {
    double r = std::hypot(x, y);
    if (r > 0.0) {
      c = x / r;
      s = y / r;
    }
  }
  void rows(Eigen::MatrixXd& M, int i, int j, int c0, int c1) const {
    for (int k = c0; k < c1; ++k) {
      double u = M(i, k), v = M(j, k);
      M(i, k) = c * u + s * v;
      M(j, k) = -s * u + c * v;
    }
  }
  void cols(Eigen::MatrixXd& M, int i, int j) const {
    double* a = M.col(i).data();
    double* b = M.col(j).data();
    for (Eigen::Index k = 0; k < M.rows(); ++k) {
      double u = a[k], v = b[k];
      a[k] = c * u + s * v;
      b[k] = -s * u + c * v;
    }
  }
};

// Interior system D_I^T = Q R kept current under row removal and insertion.
class QrInterior {
 public:
  QrInterior(const Eigen::MatrixXd& Dt, const std::vector<int>& order) : n_(static_cast<int>(Dt.rows())) {
    int m = static_cast<int>(order.size());
    Eigen::MatrixXd A(n_, m);
    for (int k = 0; k < m; ++k) A.col(k) = Dt.col(order[k]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Q_ = qr.householderQ();
    R_ = Eigen::MatrixXd::Zero(n_, std::max(n_, 1));
    Eigen::MatrixXd top = qr.matrixQR().topRows(m);
    top.triangularView<Eigen::StrictlyLower>().setZero();
    R_.topLeftCorner(m, m) = top;
    r_ = m;
  }

  int rank() const { return r_; }

  void remove(int pos) {
    for (int k = pos; k < r_ - 1; ++k) R_.col(k).head(k + 2) = R_.col(k + 1).head(k + 2);
    R_.col(r_ - 1).setZero();
    --r_;
    for (int k = pos; k < r_; ++k) {
      Rot g(R_(k, k), R_(k + 1, k));
      g.rows(R_, k, k + 1, k, r_);
      R_(k + 1, k) = 0.0;
      g.cols(Q_, k, k + 1);
    }
  }

  void append(const SparseRowMatrix& D, int row) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n_);
    for (SparseRowMatrix::InnerIterator it(D, row); it; ++it) w += it.value() * Q_.row(it.col()).transpose();
    for (int k = n_ - 2; k >= r_; --k) {
      if (w(k + 1) == 0.0) continue;
      Rot g(w(k), w(k + 1));
      double u = w(k), v = w(k + 1);
      w(k) = g.c * u + g.s * v;
      w(k + 1) = 0.0;
      g.cols(Q_, k, k + 1);
    }
    R_.col(r_).head(r_ + 1) = w.head(r_ + 1);
    ++r_;
  }

  StepTerms terms(const Eigen::VectorXd& y, const Eigen::VectorXd& vb, bool need_mu) const {
    StepTerms t;
    Eigen::MatrixXd rhs(n_, 2);
    rhs.col(0) = y;
    rhs.col(1) = vb;
    Eigen::MatrixXd z = Q_.transpose() * rhs;
    auto tri = R_.topLeftCorner(r_, r_).triangularView<Eigen::Upper>();
    t.a = tri.solve(z.col(0).head(r_));
    t.b = tri.solve(z.col(1).head(r_));
    if (need_mu) {
      auto Q2 = Q_.rightCols(n_ - r_);
      t.mu_a = Q2 * z.col(0).tail(n_ - r_);
      t.mu_b = Q2 * z.col(1).tail(n_ - r_);
    }
    return t;
  }

 private:
  int n_;
  Eigen::MatrixXd Q_, R_;
  int r_ = 0;
};

// Pseudo-inverse route for row-rank-deficient D; refactors every step.
StepTerms cod_terms(const SparseRowMatrix& D, const std::vector<int>& interior, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& vb, double tol) {
  int n = static_cast<int>(D.cols());
  int r = static_cast<int>(interior.size());
  StepTerms t;
  if (r == 0) {
    t.a.resize(0);
    t.b.resize(0);
    t.mu_a = y;
    t.mu_b = vb;
    return t;
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, r);
  for (int k = 0; k < r; ++k)
    for (SparseRowMatrix::InnerIterator it(D, interior[k]); it; ++it) A(it.col(), k) = it.value();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(tol);
  cod.compute(A);
  t.a = cod.solve(y);
  t.b = cod.solve(vb);
  t.mu_a = y - A * t.a;
  t.mu_b = vb - A * t.b;
  return t;
}

double row_dot(const SparseRowMatrix& D, int row, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (SparseRowMatrix::InnerIterator it(D, row); it; ++it) s += it.value() * v(it.col());
  return s;
}

}  // namespace

const char* to_string(PathEvent e) {
  switch (e) {
    case PathEvent::init: return "init";
    case PathEvent::hit: return "hit";
    case PathEvent::leave: return "leave";
    case PathEvent::terminal: return "terminal";
  }
  return "?";
}

Eigen::VectorXd primal_from_dual(const Eigen::VectorXd& y, const SparseRowMatrix& D, const Eigen::VectorXd& nu) {
  if (D.cols() != y.size() || D.rows() != nu.size()) throw std::invalid_argument("primal_from_dual: dimension mismatch");
  return y - D.transpose() * nu;
}

SolutionPath solve_dual_path(const Eigen::VectorXd& y, const SparseRowMatrix& D, const PathOptions& opt) {
  const int n = static_cast<int>(y.size());
  const int m = static_cast<int>(D.rows());
  if (D.cols() != n) throw std::invalid_argument("structure matrix must have one column per coefficient");
  if (!y.allFinite()) throw std::invalid_argument("response contains non-finite values");
  for (int i = 0; i < m; ++i)
    if (D.row(i).norm() == 0.0) throw std::invalid_argument("structure matrix has an all-zero row");

  SolutionPath path;
  path.y = y;
  path.D = D;

  // Decide between the updated QR and the pseudo-inverse fallback.
  Eigen::MatrixXd Dt = Eigen::MatrixXd(D.transpose());
  std::vector<int> interior;
  std::unique_ptr<QrInterior> qr;
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> piv(Dt);
    piv.setThreshold(opt.pinv_tol);
    path.rank_deficient = m > n || piv.rank() < m;
    if (!path.rank_deficient) {
      const auto& perm = piv.colsPermutation().indices();
      interior.assign(perm.data(), perm.data() + m);
      qr = std::make_unique<QrInterior>(Dt, interior);
    } else {
      interior.resize(m);
      for (int i = 0; i < m; ++i) interior[i] = i;
    }
  }

  std::vector<int> sign(m, 0);  // nonzero on the boundary
  Eigen::VectorXd vb = Eigen::VectorXd::Zero(n);  // D_B^T s
  auto terms = [&](bool need_mu) {
    return qr ? qr->terms(y, vb, need_mu) : cod_terms(D, interior, y, vb, opt.pinv_tol);
  };
  auto dual_of = [&](const StepTerms& t, double lambda) {
    Eigen::VectorXd nu(m);
    for (int i = 0; i < m; ++i)
      if (sign[i] != 0) nu(i) = lambda * sign[i];
    for (std::size_t k = 0; k < interior.size(); ++k) nu(interior[k]) = t.a(k) - lambda * t.b(k);
    return nu;
  };
  auto make_node = [&](const StepTerms& t, double lambda, PathEvent ev, int index) {
    PathNode nd;
    nd.lambda = lambda;
    nd.event = ev;
    nd.index = index;
    nd.dual = dual_of(t, lambda);
    nd.primal = y - D.transpose() * nd.dual;
    return nd;
  };
  auto record_boundary = [&](PathNode& nd) {
    for (int i = 0; i < m; ++i)
      if (sign[i] != 0) {
        nd.boundary.push_back(i);
        nd.signs.push_back(sign[i]);
      }
  };

  StepTerms t = terms(false);
  path.init_dual = dual_of(t, 0.0);
  path.init_primal = y - D.transpose() * path.init_dual;

  double lambda = kInf;
  int last_index = -1;
  int steps = 0;
  int cap = opt.max_steps >= 0 ? opt.max_steps : 4 * m + 10;
  double floor = std::max(0.0, opt.lambda_min);
  while (true) {
    bool have_boundary = static_cast<int>(interior.size()) < m;
    if (steps > 0) t = terms(have_boundary);

    // Hitting times.
    double hit = -1.0;
    int hit_pos = -1, hit_sign = 0;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      for (int sg : {1, -1}) {
        double den = t.b(k) + sg;
        if (den == 0.0) continue;
        double h = t.a(k) / den;
        if (!(h >= 0.0)) continue;
        if (lambda < kInf && h > lambda * (1.0 + 1e-10)) continue;
        if (interior[k] == last_index && lambda < kInf && h > lambda * (1.0 - 1e-9)) continue;
        if (h > hit) {
          hit = std::min(h, lambda);
          hit_pos = static_cast<int>(k);
          hit_sign = sg;
        }
      }
    }

    // Leaving times.
    double leave = -1.0;
    int leave_row = -1;
    if (have_boundary) {
      for (int i = 0; i < m; ++i) {
        if (sign[i] == 0) continue;
        double c = sign[i] * row_dot(D, i, t.mu_a);
        double d = sign[i] * row_dot(D, i, t.mu_b);
        if (!(c < 0.0 && d < 0.0)) continue;
        double l = c / d;
        if (l >= lambda * (1.0 - 1e-9)) continue;
        if (l > leave) {
          leave = l;
          leave_row = i;
        }
      }
    }

    double next = std::max(hit, leave);
    if (next <= floor || (hit < 0.0 && leave < 0.0) || steps >= cap) {
      path.terminal = make_node(t, floor, PathEvent::terminal, -1);
      record_boundary(path.terminal);
      break;
    }
    ++steps;
    if (hit >= leave) {
      int row = interior[hit_pos];
      PathNode nd = make_node(t, hit, PathEvent::hit, row);
      sign[row] = hit_sign;
      for (SparseRowMatrix::InnerIterator it(D, row); it; ++it) vb(it.col()) += hit_sign * it.value();
      if (qr) qr->remove(hit_pos);
      interior.erase(interior.begin() + hit_pos);
      record_boundary(nd);
      path.nodes.push_back(std::move(nd));
      last_index = row;
      lambda = hit;
    } else {
      int row = leave_row;
      PathNode nd = make_node(t, leave, PathEvent::leave, row);
      for (SparseRowMatrix::InnerIterator it(D, row); it; ++it) vb(it.col()) -= sign[row] * it.value();
      sign[row] = 0;
      if (qr) qr->append(D, row);
      interior.push_back(row);
      record_boundary(nd);
      path.nodes.push_back(std::move(nd));
      last_index = row;
      lambda = leave;
    }
  }
  return path;
}

Eigen::VectorXd dual_at_lambda(const SolutionPath& path, double lambda) {
  if (lambda < path.terminal.lambda * (1.0 - 1e-12)) throw std::out_of_range("lambda below the computed range of the path");
  // Above the first knot the boundary is empty and the dual is constant.
  if (path.nodes.empty() || lambda >= path.nodes.front().lambda) return path.init_dual;
  std::size_t k = 0;
  while (k + 1 < path.nodes.size() && path.nodes[k + 1].lambda >= lambda) ++k;
  const PathNode& hi = path.nodes[k];
  const PathNode& lo = k + 1 < path.nodes.size() ? path.nodes[k + 1] : path.terminal;
  if (lambda == hi.lambda) return hi.dual;
  if (hi.lambda == lo.lambda) return lo.dual;
  double w = (hi.lambda - lambda) / (hi.lambda - lo.lambda);
  return hi.dual + w * (lo.dual - hi.dual);
}

Eigen::VectorXd coefficients_at_lambda(const SolutionPath& path, double lambda) {
  if (path.nodes.empty() || lambda > path.nodes.front().lambda) {
    if (lambda < path.terminal.lambda * (1.0 - 1e-12)) throw std::out_of_range("lambda below the computed range of the path");
    return path.init_primal;
  }
  return primal_from_dual(path.y, path.D, dual_at_lambda(path, lambda));
}

SparseRowMatrix to_sparse(const Eigen::MatrixXd& M, double drop_tol) {
  SparseRowMatrix S = M.sparseView(1.0, drop_tol);
  S.makeCompressed();
  return S;
}

AbsorbedDesign absorb_design(const Eigen::MatrixXd& X, const SparseRowMatrix& D) {
  if (X.rows() != X.cols()) throw std::invalid_argument("design matrix must be square");
  if (D.cols() != X.cols()) throw std::invalid_argument("structure matrix width must match the design");
  // Columns are equilibrated first so raw polynomial trend columns do not
  // masquerade as near-singularity.
  Eigen::VectorXd scale = X.colwise().norm().transpose();
  for (int j = 0; j < scale.size(); ++j)
    if (scale(j) == 0.0) throw std::domain_error("design matrix has a zero column");
  Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Xs);
  AbsorbedDesign out;
  out.rcond = lu.rcond();
  if (!(out.rcond >= 1e-12)) throw std::domain_error("design matrix is singular beyond tolerance");
  out.X_inv = scale.cwiseInverse().asDiagonal() * lu.inverse();
  Eigen::MatrixXd G = D * out.X_inv;
  out.D = to_sparse(G, 1e-13 * G.cwiseAbs().maxCoeff());
  return out;
}

void write_path(std::ostream& os, const SolutionPath& path, double zero_tol) {
  os << "lambda\tevent\tindex\tboundary\tnnz\n";
  auto line = [&](const PathNode& nd) {
    Eigen::VectorXd Dmu = path.D * nd.primal;
    double scale = std::max(1.0, Dmu.cwiseAbs().maxCoeff());
    int nnz = 0;
    for (int i = 0; i < Dmu.size(); ++i) nnz += std::abs(Dmu(i)) > zero_tol * scale;
    os << nd.lambda << '\t' << to_string(nd.event) << '\t' << nd.index << '\t';
    for (std::size_t k = 0; k < nd.boundary.size(); ++k) os << (k ? "," : "") << nd.boundary[k];
    os << '\t' << nnz << '\n';
  };
  for (const auto& nd : path.nodes) line(nd);
  line(path.terminal);
}

SparseRowMatrix first_difference_matrix(int n) {
  if (n < 2) throw std::invalid_argument("first differences need n >= 2");
  SparseRowMatrix D(n - 1, n);
  std::vector<Eigen::Triplet<double>> tr;
  for (int i = 0; i < n - 1; ++i) {
    tr.emplace_back(i, i, -1.0);
    tr.emplace_back(i, i + 1, 1.0);
  }
  D.setFromTriplets(tr.begin(), tr.end());
  return D;
}

SparseRowMatrix second_difference_matrix(int n) {
  if (n < 3) throw std::invalid_argument("second differences need n >= 3");
  SparseRowMatrix D(n - 2, n);
  std::vector<Eigen::Triplet<double>> tr;
  for (int i = 0; i < n - 2; ++i) {
    tr.emplace_back(i, i, 1.0);
    tr.emplace_back(i, i + 1, -2.0);
    tr.emplace_back(i, i + 2, 1.0);
  }
  D.setFromTriplets(tr.begin(), tr.end());
  return D;
}

}  // namespace changeforge
