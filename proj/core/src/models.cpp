#include "changeforge/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "changeforge/parallel.hpp"

namespace changeforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_phi(double phi) {
  if (!(std::abs(phi) < 1.0)) throw std::domain_error("AR(1) coefficient must satisfy |phi| < 1");
}

// Seasonal dummies s_1..s_{p-1} in columns first..first+p-2; every p-th row
// carries -1 in all of them so the pattern sums to zero over a period.
void fill_seasonal(Eigen::MatrixXd& X, int first, int p) {
  for (int i = 0; i < X.rows(); ++i) {
    int r = i % p;
    if (r < p - 1)
      X(i, first + r) = 1.0;
    else
      for (int k = 0; k < p - 1; ++k) X(i, first + k) = -1.0;
  }
}

// mu_1 covers rows 0..prefuse-1, then one level per remaining row.
void fill_levels(Eigen::MatrixXd& X, int offset, int prefuse) {
  for (int i = 0; i < X.rows(); ++i) X(i, i < prefuse ? offset : offset + i - prefuse + 1) = 1.0;
}

SparseRowMatrix differences_from(int n, int offset, int order) {
  int len = n - offset;
  SparseRowMatrix block = order == 1 ? first_difference_matrix(len) : second_difference_matrix(len);
  SparseRowMatrix D(block.rows(), n);
  std::vector<Eigen::Triplet<double>> tr;
  for (int r = 0; r < block.outerSize(); ++r)
    for (SparseRowMatrix::InnerIterator it(block, r); it; ++it) tr.emplace_back(r, offset + it.col(), it.value());
  D.setFromTriplets(tr.begin(), tr.end());
  return D;
}

void push_labels(std::vector<std::string>& labels, const std::string& stem, int count) {
  for (int k = 1; k <= count; ++k) labels.push_back(stem + std::to_string(k));
}

// Basis N with beta = N c spanning {beta : (D beta)_j = 0 for j not in rows}.
Eigen::MatrixXd constraint_basis(const ModelSpec& spec, const std::vector<int>& rows) {
  int n = spec.n();
  int g = static_cast<int>(spec.global_columns.size());
  int len = n - spec.mu_offset;
  int free_rows = static_cast<int>(rows.size());
  int k = g + spec.diff_order + free_rows;
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, k);
  for (int i = 0; i < g; ++i) N(spec.global_columns[i], i) = 1.0;
  if (spec.diff_order == 1) {
    // Row r separates block positions r and r + 1.
    int seg = 0;
    std::size_t next = 0;
    for (int j = 0; j < len; ++j) {
      while (next < rows.size() && rows[next] + 1 <= j) {
        ++seg;
        ++next;
      }
      N(spec.mu_offset + j, g + seg) = 1.0;
    }
  } else {
    // Row r centres on block position r + 1: hinge (j - r - 1)_+.
    for (int j = 0; j < len; ++j) {
      N(spec.mu_offset + j, g) = 1.0;
      N(spec.mu_offset + j, g + 1) = j;
      for (int i = 0; i < free_rows; ++i) N(spec.mu_offset + j, g + 2 + i) = std::max(0, j - rows[i] - 1);
    }
  }
  return N;
}

bool better(double bic, double phi, double best_bic, double best_phi) {
  double slack = 1e-10 * std::max(1.0, std::abs(best_bic));
  if (bic < best_bic - slack) return true;
  return bic <= best_bic + slack && phi < best_phi;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

const char* to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::mean_shift: return "mean_shift";
    case ModelFamily::ar1_mean_shift: return "ar1_mean_shift";
    case ModelFamily::fixed_trend: return "fixed_trend";
    case ModelFamily::trend_shift: return "trend_shift";
    case ModelFamily::seasonal: return "seasonal";
    case ModelFamily::seasonal_trend: return "seasonal_trend";
    case ModelFamily::quad_seasonal: return "quad_seasonal";
  }
  return "unknown";
}

ModelFamily parse_family(const std::string& token) {
  for (auto f : {ModelFamily::mean_shift, ModelFamily::ar1_mean_shift, ModelFamily::fixed_trend,
                 ModelFamily::trend_shift, ModelFamily::seasonal, ModelFamily::seasonal_trend,
                 ModelFamily::quad_seasonal})
    if (token == to_string(f)) return f;
  throw std::invalid_argument("unknown model family '" + token + "'");
}

int ModelSpec::row_to_tau(int row) const { return prefuse + diff_order + row; }
int ModelSpec::tau_to_row(int tau) const { return tau - prefuse - diff_order; }

ChangepointVector ModelSpec::taus(const std::vector<int>& rows) const {
  ChangepointVector out;
  for (int r : rows) out.push_back(row_to_tau(r));
  return out;
}

double design_rcond(const Eigen::MatrixXd& X) {
  Eigen::VectorXd scale = X.colwise().norm().transpose();
  if ((scale.array() == 0.0).any()) return 0.0;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(X * scale.cwiseInverse().asDiagonal()).rcond();
}

ModelSpec build_model(ModelFamily family, int n, const ModelParams& params) {
  ModelSpec s;
  s.family = family;
  int p = params.period;
  s.X = Eigen::MatrixXd::Zero(n, n);
  auto need = [&](int min_n, const char* what) {
    if (n < min_n) throw std::invalid_argument(std::string(to_string(family)) + " needs " + what);
  };
  switch (family) {
    case ModelFamily::mean_shift:
      need(2, "n >= 2");
      s.X.setIdentity();
      break;
    case ModelFamily::trend_shift:
      need(3, "n >= 3");
      s.X.setIdentity();
      s.diff_order = 2;
      break;
    case ModelFamily::ar1_mean_shift:
    case ModelFamily::fixed_trend:
      need(3, "n >= 3");
      if (family == ModelFamily::ar1_mean_shift) {
        if (static_cast<int>(params.y.size()) != n) throw std::invalid_argument("ar1_mean_shift needs the series for its lag column");
        for (int i = 1; i < n; ++i) s.X(i, 0) = params.y[i - 1];
        s.labels.push_back("phi");
      } else {
        for (int i = 0; i < n; ++i) s.X(i, 0) = i + 1;
        s.labels.push_back("alpha");
      }
      s.global_columns = {0};
      s.mu_offset = 1;
      break;
    case ModelFamily::seasonal:
      if (p < 2) throw std::invalid_argument("period must be at least 2");
      need(p + 2, "n > p + 1");
      fill_seasonal(s.X, 0, p);
      push_labels(s.labels, "s", p - 1);
      for (int k = 0; k < p - 1; ++k) s.global_columns.push_back(k);
      s.mu_offset = p - 1;
      break;
    case ModelFamily::seasonal_trend:
      if (p < 2) throw std::invalid_argument("period must be at least 2");
      need(p + 3, "n > p + 2");
      for (int i = 0; i < n; ++i) s.X(i, 0) = i + 1;
      fill_seasonal(s.X, 1, p);
      s.labels.push_back("alpha");
      push_labels(s.labels, "s", p - 1);
      for (int k = 0; k < p; ++k) s.global_columns.push_back(k);
      s.mu_offset = p;
      break;
    case ModelFamily::quad_seasonal:
      if (p < 2) throw std::invalid_argument("period must be at least 2");
      need(p + 4, "n > p + 3");
      for (int i = 0; i < n; ++i) {
        s.X(i, 0) = i + 1;
        s.X(i, 1) = double(i + 1) * (i + 1);
      }
      fill_seasonal(s.X, 2, p);
      s.labels = {"beta1", "beta2"};
      push_labels(s.labels, "s", p - 1);
      for (int k = 0; k <= p; ++k) s.global_columns.push_back(k);
      s.mu_offset = p + 1;
      break;
  }
  if (family == ModelFamily::seasonal || family == ModelFamily::seasonal_trend ||
      family == ModelFamily::quad_seasonal)
    s.period = p;
  // Levels: with second differences each point has its own level; otherwise
  // mu_1 absorbs whatever the global columns leave unidentified.
  s.prefuse = s.diff_order == 2 ? 1 : static_cast<int>(s.global_columns.size()) + 1;
  if (s.diff_order == 2)
    for (int i = 0; i < n; ++i) s.X(i, i) = 1.0;
  else
    fill_levels(s.X, s.mu_offset, s.prefuse);
  push_labels(s.labels, "mu", n - s.mu_offset);
  s.D = differences_from(n, s.mu_offset, s.diff_order);
  double rc = design_rcond(s.X);
  if (!(rc > 1e-12)) throw std::domain_error("design matrix is not invertible for this series");
  return s;
}

Eigen::MatrixXd ar1_correlation(double phi, int n) {
  check_phi(phi);
  if (n < 1) throw std::invalid_argument("n must be positive");
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = std::pow(phi, std::abs(i - j));
  return R;
}

double ar1_log_det(double phi, int n) {
  check_phi(phi);
  return (n - 1) * std::log1p(-phi * phi);
}

SparseRowMatrix prewhitening_matrix(double phi, int n) {
  check_phi(phi);
  double s = 1.0 / std::sqrt(1.0 - phi * phi);
  SparseRowMatrix L(n, n);
  std::vector<Eigen::Triplet<double>> tr{{0, 0, 1.0}};
  for (int t = 1; t < n; ++t) {
    tr.emplace_back(t, t - 1, -phi * s);
    tr.emplace_back(t, t, s);
  }
  L.setFromTriplets(tr.begin(), tr.end());
  return L;
}

Eigen::VectorXd prewhiten(const Eigen::VectorXd& y, double phi) {
  check_phi(phi);
  if (phi == 0.0) return y;
  double s = 1.0 / std::sqrt(1.0 - phi * phi);
  Eigen::VectorXd out(y.size());
  if (y.size()) out(0) = y(0);
  for (int t = 1; t < y.size(); ++t) out(t) = (y(t) - phi * y(t - 1)) * s;
  return out;
}

Eigen::MatrixXd prewhiten(const Eigen::MatrixXd& X, double phi) {
  check_phi(phi);
  if (phi == 0.0) return X;
  double s = 1.0 / std::sqrt(1.0 - phi * phi);
  Eigen::MatrixXd out(X.rows(), X.cols());
  if (X.rows()) out.row(0) = X.row(0);
  for (int t = 1; t < X.rows(); ++t) out.row(t) = (X.row(t) - phi * X.row(t - 1)) * s;
  return out;
}

double bic_phi(double sse_phi, int n, int k, double phi) {
  if (!(sse_phi > 0.0)) throw std::domain_error("BIC_phi needs a positive SSE");
  return n * std::log(sse_phi / n) + k * std::log(static_cast<double>(n)) + ar1_log_det(phi, n);
}

int effective_parameters(const ModelSpec& spec, int m_hat) {
  return static_cast<int>(spec.global_columns.size()) + spec.diff_order + m_hat;
}

ConstrainedFit refit_changepoints(const ModelSpec& spec, const Eigen::VectorXd& y, const std::vector<int>& rows,
                                  double phi) {
  int n = spec.n();
  if (y.size() != n) throw std::invalid_argument("series length does not match the model");
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i] < 0 || rows[i] >= spec.D.rows() || (i && rows[i] <= rows[i - 1]))
      throw std::invalid_argument("changepoint rows must be increasing and inside D");
  Eigen::MatrixXd N = constraint_basis(spec, rows);
  SparseRowMatrix Xs = spec.X.sparseView();
  Eigen::MatrixXd Z = prewhiten(Eigen::MatrixXd(Xs * N), phi);
  Eigen::VectorXd yw = prewhiten(y, phi);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  if (qr.rank() < Z.cols()) throw std::domain_error("constrained refit is rank deficient");
  Eigen::VectorXd c = qr.solve(yw);
  ConstrainedFit out;
  out.k = static_cast<int>(Z.cols());
  out.beta = N * c;
  out.fitted = Xs * out.beta;
  out.sse_phi = (yw - Z * c).squaredNorm();
  out.sigma2 = n > out.k ? out.sse_phi / (n - out.k) : 0.0;
  int g = static_cast<int>(spec.global_columns.size());
  if (g > 0) {
    Eigen::MatrixXd gram = Z.transpose() * Z;
    Eigen::MatrixXd inv = gram.ldlt().solve(Eigen::MatrixXd::Identity(out.k, out.k));
    out.global_cov = out.sigma2 * inv.topLeftCorner(g, g);
  }
  return out;
}

std::vector<double> default_phi_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 19; ++i) g.push_back(0.05 * i);
  return g;
}

PhiSearchResult oracle_phi_fit(const ModelSpec& spec, const Eigen::VectorXd& y, const std::vector<int>& rows,
                               const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("phi grid is empty");
  PhiSearchResult best;
  best.bic = kInf;
  int k = effective_parameters(spec, static_cast<int>(rows.size()));
  for (double phi : grid) {
    auto fit = refit_changepoints(spec, y, rows, phi);
    double b = bic_phi(std::max(fit.sse_phi, 1e-300), spec.n(), k, phi);
    best.grid.push_back({phi, b, static_cast<int>(rows.size()), 0});
    if (best.bic == kInf || better(b, phi, best.bic, best.phi)) {
      best.phi = phi;
      best.bic = b;
      best.beta = fit.beta;
      best.fitted = fit.fitted;
    }
  }
  best.rows = rows;
  best.taus = spec.taus(rows);
  best.bic_before_refinement = best.bic;
  return best;
}

PhiSearchResult phi_grid_search(const ModelSpec& spec, const Eigen::VectorXd& y, const std::vector<double>& grid,
                                const IrflConfig& cfg, int radius) {
  if (grid.empty()) throw std::invalid_argument("phi grid is empty");
  for (double phi : grid) check_phi(phi);
  validate(cfg);
  int n = spec.n();
  if (y.size() != n) throw std::invalid_argument("series length does not match the model");

  struct PerPhi {
    double bic = kInf;
    int iteration = 0;
    IrflIteration rec;
  };
  std::vector<PerPhi> per(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    double phi = grid[i];
    IrflRun run = run_irfl(prewhiten(y, phi), prewhiten(spec.X, phi), spec.D, cfg);
    for (const auto& rec : run.trace.iterations) {
      if (!rec.accepted) continue;
      double b = bic_phi(std::max(rec.sse, 1e-300), n, effective_parameters(spec, rec.m_hat), phi);
      if (per[i].bic == kInf || b < per[i].bic - 1e-10 * std::max(1.0, std::abs(per[i].bic))) {
        per[i].bic = b;
        per[i].iteration = rec.iteration;
        per[i].rec = rec;
      }
    }
  });

  PhiSearchResult res;
  res.bic = kInf;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    res.grid.push_back({grid[i], per[i].bic, per[i].rec.m_hat, per[i].iteration});
    if (res.bic == kInf || better(per[i].bic, grid[i], res.bic, res.phi)) {
      res.bic = per[i].bic;
      res.phi = grid[i];
      arg = i;
    }
  }
  res.bic_before_refinement = res.bic;

  // Local search from the best set of every phi: drop a changepoint, shift
  // one by up to +-radius rows, or re-scan phi, using unpenalised refits.
  // Moves are kept only on strict improvement.
  struct State {
    double bic = kInf, phi = 0.0;
    std::vector<int> rows;
    Eigen::VectorXd beta, fitted;
    int moves = 0;
  };
  auto score = [&](const std::vector<int>& rows, double phi, ConstrainedFit* keep) {
    auto fit = refit_changepoints(spec, y, rows, phi);
    double b = bic_phi(std::max(fit.sse_phi, 1e-300), n, effective_parameters(spec, static_cast<int>(rows.size())), phi);
    if (keep) *keep = std::move(fit);
    return b;
  };
  auto improves = [](double b, double ref) { return b < ref - 1e-10 * std::max(1.0, std::abs(ref)); };
  int rows_total = static_cast<int>(spec.D.rows());
  auto polish = [&](State st) {
    ConstrainedFit fit;
    auto take = [&](double b, const std::vector<int>& rows, double phi) {
      st.bic = b;
      st.rows = rows;
      st.phi = phi;
      st.beta = fit.beta;
      st.fitted = fit.fitted;
      ++st.moves;
    };
    double b0 = score(st.rows, st.phi, &fit);
    if (improves(b0, st.bic)) {
      st.bic = b0;
      st.beta = fit.beta;
      st.fitted = fit.fitted;
    }
    for (int sweep = 0; sweep < 50; ++sweep) {
      bool moved = false;
      for (bool dropped = true; dropped && !st.rows.empty();) {
        dropped = false;
        double best = st.bic;
        std::size_t which = 0;
        for (std::size_t i = 0; i < st.rows.size(); ++i) {
          auto trial = st.rows;
          trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
          double b = score(trial, st.phi, nullptr);
          if (improves(b, best)) {
            best = b;
            which = i;
            dropped = true;
          }
        }
        if (dropped) {
          auto trial = st.rows;
          trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(which));
          score(trial, st.phi, &fit);
          take(best, trial, st.phi);
          moved = true;
        }
      }
      for (std::size_t i = 0; i < st.rows.size(); ++i) {
        int lo = i ? st.rows[i - 1] + 1 : 0;
        int hi = i + 1 < st.rows.size() ? st.rows[i + 1] - 1 : rows_total - 1;
        int orig = st.rows[i];
        for (int d = -radius; d <= radius; ++d) {
          int r = orig + d;
          if (d == 0 || r < lo || r > hi) continue;
          auto trial = st.rows;
          trial[i] = r;
          double b = score(trial, st.phi, &fit);
          if (improves(b, st.bic)) {
            take(b, trial, st.phi);
            moved = true;
          }
        }
      }
      for (double phi : grid) {
        if (phi == st.phi) continue;
        double b = score(st.rows, phi, &fit);
        if (improves(b, st.bic)) {
          take(b, st.rows, phi);
          moved = true;
        }
      }
      if (!moved) break;
    }
    return st;
  };

  std::vector<std::size_t> order{arg};
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (i != arg && per[i].bic != kInf) order.push_back(i);
  std::vector<std::vector<int>> seen;
  State best;
  for (std::size_t i : order) {
    const auto& rows = per[i].rec.change_rows;
    if (std::find(seen.begin(), seen.end(), rows) != seen.end()) continue;
    seen.push_back(rows);
    State st{per[i].bic, grid[i], rows, per[i].rec.beta, spec.X * per[i].rec.beta, 0};
    st = polish(std::move(st));
    if (best.bic == kInf || improves(st.bic, best.bic)) best = std::move(st);
  }
  res.bic = best.bic;
  res.phi = best.phi;
  res.rows = best.rows;
  res.beta = best.beta;
  res.fitted = best.fitted;
  res.refinement_moves = best.moves;
  res.taus = spec.taus(res.rows);
  return res;
}

MonthlySeries read_noaa_monthly(const std::string& path, int value_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  MonthlySeries out;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::vector<std::string> fields;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      auto a = cell.find_first_not_of(" \t\r");
      auto b = cell.find_last_not_of(" \t\r");
      fields.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
    }
    if (fields.size() == 1) {
      // whitespace separated variant
      fields.clear();
      std::istringstream ws(line);
      while (ws >> cell) fields.push_back(cell);
    }
    bool numeric = !fields.empty() && (std::isdigit(static_cast<unsigned char>(fields[0][0])) || fields[0][0] == '-');
    if (first && !numeric) {
      first = false;
      for (std::size_t i = 0; i < fields.size(); ++i)
        if (value_column < 0 && lower(fields[i]) == "average") value_column = static_cast<int>(i);
      continue;
    }
    first = false;
    if (!numeric) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    int col = value_column >= 0 ? value_column : (fields.size() >= 4 ? 3 : 2);
    if (static_cast<int>(fields.size()) <= col) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": too few columns");
    try {
      int yr = std::stoi(fields[0]);
      int mo = std::stoi(fields[1]);
      double v = std::stod(fields[col]);
      if (std::abs(v + 99.99) < 1e-9)
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": missing value (-99.99) for " +
                                 std::to_string(yr) + "-" + std::to_string(mo) + "; fill or trim the series first");
      out.year.push_back(yr);
      out.month.push_back(mo);
      out.value.push_back(v);
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  if (out.value.empty()) throw std::runtime_error(path + ": no data rows");
  return out;
}

}  // namespace changeforge
