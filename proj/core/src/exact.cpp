#include "changeforge/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace changeforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Best {
  double value = kInf;
  int count = std::numeric_limits<int>::max();
  int r = 0;
};

// Lower value wins; within tolerance fewer changepoints, then smaller r.
// Candidates arrive in increasing r so equal counts keep the incumbent.
void offer(Best& b, double value, int count, int r, double tol) {
  if (b.r == 0) {
    b = {value, count, r};
    return;
  }
  double scale = tol * std::max(1.0, std::abs(b.value));
  if (value < b.value - scale || (value <= b.value + scale && count < b.count)) b = {value, count, r};
}

ChangepointVector backtrack(const std::vector<int>& last, int n) {
  ChangepointVector taus;
  for (int s = n + 1; last[s] > 1; s = last[s]) taus.push_back(last[s]);
  std::reverse(taus.begin(), taus.end());
  return taus;
}

void check_options(const PartitionOptions& opt) {
  if (!(opt.beta >= 0.0)) throw std::invalid_argument("penalty must be nonnegative");
  if (opt.min_segment < 1) throw std::invalid_argument("min_segment must be at least 1");
}

}  // namespace

PartitionResult optimal_partition(const TimeSeries& y, const CostFunction& cost, const PartitionOptions& opt) {
  check_options(opt);
  int n = y.n(), d = opt.min_segment;
  SegmentStats st(y.values());
  std::vector<double> F(n + 2, kInf);
  std::vector<int> cnt(n + 2, 0), last(n + 2, 0);
  F[1] = -opt.beta;
  PartitionResult res;
  for (int s = 2; s <= n + 1; ++s) {
    Best b;
    int seen = 0;
    for (int r = 1; r <= s - d; ++r) {
      if (F[r] == kInf) continue;
      ++seen;
      double v = F[r] + st.cost(r, s - 1, cost) + opt.beta;
      offer(b, v, cnt[r] + (r > 1), r, opt.tie_tol);
    }
    res.candidate_sizes.push_back(seen);
    if (b.r == 0) continue;
    F[s] = b.value;
    cnt[s] = b.count;
    last[s] = b.r;
  }
  if (F[n + 1] == kInf) throw std::invalid_argument("no admissible segmentation for min_segment");
  res.taus = backtrack(last, n);
  res.cost = F[n + 1];
  res.per_segment_cost = F[n + 1] + opt.beta;
  return res;
}

PartitionResult pelt(const TimeSeries& y, const CostFunction& cost, const PartitionOptions& opt) {
  check_options(opt);
  int n = y.n(), d = opt.min_segment;
  SegmentStats st(y.values());
  std::vector<double> F(n + 2, kInf);
  std::vector<int> cnt(n + 2, 0), last(n + 2, 0);
  F[1] = -opt.beta;
  PartitionResult res;
  std::vector<int> R{1}, next;
  std::vector<double> vals;
  for (int s = 2; s <= n + 1; ++s) {
    Best b;
    vals.assign(R.size(), kInf);
    for (std::size_t i = 0; i < R.size(); ++i) {
      int r = R[i];
      if (s - r < d || F[r] == kInf) continue;
      vals[i] = F[r] + st.cost(r, s - 1, cost);
      offer(b, vals[i] + opt.beta, cnt[r] + (r > 1), r, opt.tie_tol);
    }
    res.candidate_sizes.push_back(static_cast<int>(R.size()));
    if (b.r != 0) {
      F[s] = b.value;
      cnt[s] = b.count;
      last[s] = b.r;
    }
    next.clear();
    double slack = opt.tie_tol * std::max(1.0, std::abs(F[s]));
    for (std::size_t i = 0; i < R.size(); ++i) {
      if (vals[i] == kInf || vals[i] + opt.K <= F[s] + slack)
        next.push_back(R[i]);
      else
        ++res.pruned;
    }
    next.push_back(s);
    R.swap(next);
  }
  if (F[n + 1] == kInf) throw std::invalid_argument("no admissible segmentation for min_segment");
  res.taus = backtrack(last, n);
  res.cost = F[n + 1];
  res.per_segment_cost = F[n + 1] + opt.beta;
  return res;
}

PartitionResult exhaustive_partition(const TimeSeries& y, const CostFunction& cost, double beta) {
  int n = y.n();
  if (n > 20) throw std::invalid_argument("exhaustive search limited to n <= 20");
  SegmentStats st(y.values());
  PartitionResult res;
  double best = kInf;
  int best_m = 0;
  unsigned long long total = 1ULL << (n - 1);
  for (unsigned long long mask = 0; mask < total; ++mask) {
    double c = 0.0;
    int start = 1, m = 0;
    for (int t = 2; t <= n; ++t)
      if (mask >> (t - 2) & 1ULL) {
        c += st.cost(start, t - 1, cost);
        start = t;
        ++m;
      }
    c += st.cost(start, n, cost) + beta * m;
    double scale = std::isfinite(best) ? 1e-10 * std::max(1.0, std::abs(best)) : 0.0;
    if (c < best - scale || (c <= best + scale && m < best_m)) {
      best = c;
      best_m = m;
      res.taus.clear();
      for (int t = 2; t <= n; ++t)
        if (mask >> (t - 2) & 1ULL) res.taus.push_back(t);
    }
  }
  res.cost = best;
  res.per_segment_cost = best + beta;
  return res;
}

std::vector<SegmentationLevel> segment_neighbourhood(const TimeSeries& y, const CostFunction& cost, int m_max) {
  int n = y.n();
  if (m_max < 0 || m_max >= n) throw std::invalid_argument("m_max must lie in [0, n)");
  SegmentStats st(y.values());
  std::vector<std::vector<double>> F(m_max + 1, std::vector<double>(n + 2, kInf));
  std::vector<std::vector<int>> back(m_max + 1, std::vector<int>(n + 2, 0));
  for (int s = 2; s <= n + 1; ++s) F[0][s] = st.cost(1, s - 1, cost);
  for (int m = 1; m <= m_max; ++m)
    for (int s = m + 2; s <= n + 1; ++s) {
      double best = kInf;
      int arg = 0;
      for (int r = m + 1; r < s; ++r) {
        double v = F[m - 1][r] + st.cost(r, s - 1, cost);
        if (v < best) {
          best = v;
          arg = r;
        }
      }
      F[m][s] = best;
      back[m][s] = arg;
    }
  std::vector<SegmentationLevel> out;
  for (int m = 0; m <= m_max; ++m) {
    SegmentationLevel lv;
    lv.m = m;
    lv.cost = F[m][n + 1];
    int s = n + 1;
    for (int i = m; i >= 1; --i) {
      s = back[i][s];
      lv.taus.push_back(s);
    }
    std::reverse(lv.taus.begin(), lv.taus.end());
    out.push_back(std::move(lv));
  }
  return out;
}

double ar1seg_phi(const TimeSeries& y) {
  int n = y.n();
  if (n < 5) throw std::invalid_argument("AR1Seg needs n >= 5");
  std::vector<double> d1, d2;
  for (int t = 1; t < n; ++t) d1.push_back(std::abs(y(t + 1) - y(t)));
  for (int t = 1; t + 2 <= n; ++t) d2.push_back(std::abs(y(t + 2) - y(t)));
  double den = median(d1);
  if (den == 0.0) throw std::domain_error("robust AR estimate undefined: median first difference is zero");
  double num = median(d2);
  double phi = (num * num) / (den * den) - 1.0;
  return std::clamp(phi, -0.99, 0.99);
}

Ar1SegResult ar1seg(const TimeSeries& y, int m_max) {
  Ar1SegResult out;
  out.phi_tilde = ar1seg_phi(y);
  int n = y.n();
  std::vector<double> z;
  for (int t = 2; t <= n; ++t) z.push_back(y(t) - out.phi_tilde * y(t - 1));
  TimeSeries zs(z);
  int nz = zs.n();
  m_max = std::min(m_max, nz - 1);
  auto levels = pruned_segment_neighbourhood(zs, m_max);
  double best = kInf;
  ChangepointVector pick;
  double logn = std::log(static_cast<double>(nz));
  for (const auto& lv : levels) {
    ChangepointVector clean;
    for (int t : lv.taus)
      if (clean.empty() || t != clean.back() + 1) clean.push_back(t);
    auto fit = piecewise_mean_fit(zs, clean);
    double m = static_cast<double>(clean.size());
    double bic = nz * std::log(std::max(fit.sse / nz, 1e-300)) + (2.0 * m + 2.0) * logn;
    out.bic.push_back(bic);
    double tol = 1e-12 * std::max(1.0, std::abs(bic));
    if (out.bic.size() == 1 || bic < best - tol || (bic <= best + tol && clean.size() < pick.size())) {
      best = bic;
      pick = clean;
      out.deltas = fit.means;
    }
  }
  for (int t : pick) out.taus.push_back(t + 1);  // z index j is time j + 1
  return out;
}

}  // namespace changeforge
