#include "changeforge/heuristic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

#include "changeforge/rng.hpp"

namespace changeforge {

namespace {

struct Candidate {
  int b = 0;
  double stat = -1.0;
};

// argmax over b in [s + d, e - d + 1]; ties go to the smallest b.
template <class F>
Candidate scan(int s, int e, int d, F&& contrast) {
  Candidate c;
  for (int b = s + d; b <= e - d + 1; ++b) {
    double v = contrast(s, b, e);
    if (v > c.stat) {
      c.stat = v;
      c.b = b;
    }
  }
  return c;
}

bool fits(const Interval& iv, int d) { return iv.e - iv.s + 1 >= 2 * d; }

bool inside(const Interval& iv, int s, int e) { return iv.s >= s && iv.e <= e; }

bool at_limit(const DetectionConfig& cfg, const DetectionResult& r) {
  return cfg.max_changepoints >= 0 && static_cast<int>(r.taus.size()) >= cfg.max_changepoints;
}

void finish(DetectionResult& r) { std::sort(r.taus.begin(), r.taus.end()); }

// Shared recursion for WBS and NOT. Per-interval bests are computed once,
// since the interval set does not depend on the recursion segment.
class IntervalSearch {
 public:
  using Contrast = std::function<double(int, int, int)>;

  IntervalSearch(std::vector<Interval> ivs, int d, Contrast c)
      : ivs_(std::move(ivs)), d_(d), contrast_(std::move(c)) {
    best_.reserve(ivs_.size());
    for (const auto& iv : ivs_) best_.push_back(fits(iv, d_) ? scan(iv.s, iv.e, d_, contrast_) : Candidate{});
  }

  // Strongest split over intervals inside [s, e] plus [s, e] itself.
  std::pair<Candidate, Interval> strongest(int s, int e) const {
    Candidate best = scan(s, e, d_, contrast_);
    Interval where{s, e};
    for (std::size_t m = 0; m < ivs_.size(); ++m) {
      if (!inside(ivs_[m], s, e) || best_[m].stat < 0.0) continue;
      const auto& c = best_[m];
      if (c.stat > best.stat || (c.stat == best.stat && c.b < best.b)) {
        best = c;
        where = ivs_[m];
      }
    }
    return {best, where};
  }

  // Narrowest interval inside [s, e] (or [s, e]) whose best exceeds zeta.
  std::pair<Candidate, Interval> narrowest(int s, int e, double zeta) const {
    Candidate best;
    Interval where{s, e};
    int width = std::numeric_limits<int>::max();
    for (std::size_t m = 0; m < ivs_.size(); ++m) {
      if (!inside(ivs_[m], s, e) || !(best_[m].stat > zeta)) continue;
      int w = ivs_[m].e - ivs_[m].s;
      if (w < width || (w == width && ivs_[m].s < where.s)) {
        width = w;
        best = best_[m];
        where = ivs_[m];
      }
    }
    if (best.stat < 0.0) {
      Candidate full = scan(s, e, d_, contrast_);
      if (full.stat > zeta) {
        best = full;
        where = {s, e};
      }
    }
    return {best, where};
  }

  int min_obs() const { return d_; }

 private:
  std::vector<Interval> ivs_;
  std::vector<Candidate> best_;
  int d_;
  Contrast contrast_;
};

}  // namespace

std::vector<Interval> draw_intervals(int n, int M, int min_segment, std::uint64_t seed) {
  std::vector<Interval> out;
  if (M <= 0 || n < 2 * min_segment) return out;
  SplitMix64 rng(seed);
  long long attempts = 0, cap = 50LL * M;
  while (static_cast<int>(out.size()) < M && attempts < cap) {
    ++attempts;
    int a = rng.uniform_int(1, n), b = rng.uniform_int(1, n);
    if (a > b) std::swap(a, b);
    if (b - a + 1 < 2 * min_segment || a == b) continue;
    out.push_back({a, b});
  }
  return out;
}

std::vector<Interval> dyadic_intervals(int n, int min_segment) {
  std::vector<Interval> out;
  int need = std::max(2, 2 * min_segment);
  for (int len = n; len >= need; len = len / 2) {
    int step = std::max(1, len / 2);
    int last = 0;
    for (int s = 1; s + len - 1 <= n; s += step) {
      out.push_back({s, s + len - 1});
      last = s;
    }
    if (last + len - 1 < n) out.push_back({n - len + 1, n});
    if (len == need) break;
  }
  return out;
}

double default_threshold(const TimeSeries& y) {
  return mad_sigma(y.values()) * std::sqrt(2.0 * std::log(static_cast<double>(y.n())));
}

DetectionResult binary_segmentation(const TimeSeries& y, const DetectionConfig& cfg) {
  if (y.n() < 3) throw std::invalid_argument("binary segmentation needs n >= 3");
  DetectionResult r;
  r.threshold = cfg.threshold.value_or(default_threshold(y));
  MeanContrast mc(y.values());
  auto contrast = [&](int s, int b, int e) { return std::abs(mc(s, b, e)); };
  int d = std::max(1, cfg.min_segment);
  std::function<void(int, int)> rec = [&](int s, int e) {
    if (e - s + 1 < 2 * d || at_limit(cfg, r)) return;
    Candidate c = scan(s, e, d, contrast);
    if (!(c.stat > r.threshold)) return;
    r.taus.push_back(c.b);
    r.audit.push_back({c.b, {s, e}, {s, e}, c.stat});
    rec(s, c.b - 1);
    rec(c.b, e);
  };
  rec(1, y.n());
  finish(r);
  return r;
}

DetectionResult wild_binary_segmentation(const TimeSeries& y, const DetectionConfig& cfg) {
  if (y.n() < 3) throw std::invalid_argument("wild binary segmentation needs n >= 3");
  DetectionResult r;
  r.threshold = cfg.threshold.value_or(default_threshold(y));
  int d = std::max(1, cfg.min_segment);
  MeanContrast mc(y.values());
  IntervalSearch search(draw_intervals(y.n(), cfg.intervals, d, cfg.seed), d,
                        [&](int s, int b, int e) { return std::abs(mc(s, b, e)); });
  std::function<void(int, int)> rec = [&](int s, int e) {
    if (e - s + 1 < 2 * d || at_limit(cfg, r)) return;
    auto [c, where] = search.strongest(s, e);
    if (!(c.stat > r.threshold)) return;
    r.taus.push_back(c.b);
    r.audit.push_back({c.b, {s, e}, where, c.stat});
    rec(s, c.b - 1);
    rec(c.b, e);
  };
  rec(1, y.n());
  finish(r);
  return r;
}

DetectionResult narrowest_over_threshold(const TimeSeries& y, const DetectionConfig& cfg, SegmentFamily family) {
  if (y.n() < 3) throw std::invalid_argument("NOT needs n >= 3");
  DetectionResult r;
  r.threshold = cfg.threshold.value_or(std::sqrt(2.0 * std::log(static_cast<double>(y.n()))));
  int d = std::max(family_min_obs(family), cfg.min_segment);
  GlrOptions opt;
  double sigma = mad_sigma(y.values());
  if (family != SegmentFamily::mean_variance && sigma > 0.0) opt.variance = sigma * sigma;
  GlrScanner glr(y, family, opt);
  IntervalSearch search(draw_intervals(y.n(), cfg.intervals, d, cfg.seed), d,
                        [&](int s, int b, int e) { return std::sqrt(glr(s, b, e)); });
  std::function<void(int, int)> rec = [&](int s, int e) {
    if (e - s + 1 < 2 * d || at_limit(cfg, r)) return;
    auto [c, where] = search.narrowest(s, e, r.threshold);
    if (c.stat < 0.0) return;
    r.taus.push_back(c.b);
    r.audit.push_back({c.b, {s, e}, where, c.stat});
    rec(s, c.b - 1);
    rec(c.b, e);
  };
  rec(1, y.n());
  finish(r);
  return r;
}

ArFit fit_ar(const std::vector<double>& x, int p) {
  int n = static_cast<int>(x.size());
  if (p < 1 || n - p < p + 1) throw std::invalid_argument("series too short for the AR fit");
  Eigen::MatrixXd A(n - p, p);
  Eigen::VectorXd b(n - p);
  for (int t = p; t < n; ++t) {
    b(t - p) = x[t];
    for (int j = 1; j <= p; ++j) A(t - p, j - 1) = x[t - j];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  ArFit f;
  f.coef.assign(c.data(), c.data() + p);
  f.sse = (b - A * c).squaredNorm();
  f.used = n - p;
  return f;
}

namespace {

std::vector<double> residuals(const TimeSeries& y, const ChangepointVector& taus) {
  auto fit = piecewise_mean_fit(y, taus);
  std::vector<double> r(y.size());
  int seg = 0;
  for (int t = 1; t <= y.n(); ++t) {
    if (seg < static_cast<int>(taus.size()) && t == taus[seg]) ++seg;
    r[t - 1] = y(t) - fit.means[seg];
  }
  return r;
}

// AR order 1..5 by BIC on the residuals of a piecewise mean fit.
ArFit select_ar(const TimeSeries& y, const ChangepointVector& taus) {
  auto r = residuals(y, taus);
  ArFit best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= 5; ++p) {
    if (y.n() - p < p + 1) break;
    ArFit f = fit_ar(r, p);
    double bic = f.used * std::log(std::max(f.sse / f.used, 1e-300)) + p * std::log(double(f.used));
    if (bic < best_bic) {
      best_bic = bic;
      best = f;
    }
  }
  return best;
}

// Segment SSE of the AR-filtered series with piecewise constant intercepts.
double filtered_sse(const TimeSeries& y, const ArFit& ar, int s, int e, const std::vector<int>& cuts) {
  int p = static_cast<int>(ar.coef.size());
  int start = std::max(s, p + 1);
  if (start > e) return 0.0;
  std::vector<double> z;
  for (int t = start; t <= e; ++t) {
    double v = y(t);
    for (int j = 1; j <= p; ++j) v -= ar.coef[j - 1] * y(t - j);
    z.push_back(v);
  }
  ChangepointVector local;
  for (int c : cuts)
    if (c - start + 1 >= 2 && c - start + 1 <= static_cast<int>(z.size())) local.push_back(c - start + 1);
  std::sort(local.begin(), local.end());
  local.erase(std::unique(local.begin(), local.end()), local.end());
  return piecewise_mean_fit(TimeSeries(std::move(z)), local).sse;
}

// True when every segment of lo that gains changepoints in hi prefers them.
bool hi_survives(const TimeSeries& y, const ChangepointVector& lo, const ChangepointVector& hi, const ArFit& ar) {
  int p = static_cast<int>(ar.coef.size());
  std::vector<int> bounds{1};
  bounds.insert(bounds.end(), lo.begin(), lo.end());
  bounds.push_back(y.n() + 1);
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    int s = bounds[i], e = bounds[i + 1] - 1;
    std::vector<int> fresh;
    for (int t : hi)
      if (t > s && t <= e) fresh.push_back(t);
    if (fresh.empty()) continue;
    double len = e - s + 1;
    double q = static_cast<double>(fresh.size());
    double sse_with = std::max(filtered_sse(y, ar, s, e, fresh), 1e-300);
    double sse_without = std::max(filtered_sse(y, ar, s, e, {}), 1e-300);
    double with = 0.5 * len * std::log(sse_with / len) + (q + p) * std::log(len);
    double without = 0.5 * len * std::log(sse_without / len) + p * std::log(len);
    if (without < with) return false;
  }
  return true;
}

}  // namespace

int wcm_min_segment(int n) { return static_cast<int>(std::ceil(5.0 * std::log(static_cast<double>(n)))); }

WcmResult wcm(const TimeSeries& y, const DetectionConfig& cfg) {
  int n = y.n();
  if (n < 10) throw std::invalid_argument("WCM needs n >= 10");
  int d = cfg.min_segment > 1 ? cfg.min_segment : wcm_min_segment(n);
  int R = cfg.max_changepoints < 0 ? 5 : cfg.max_changepoints;

  // Phase 1: nested candidates, strongest split first.
  long long distinct = static_cast<long long>(n) * (n - 1) / 2;
  auto ivs = cfg.intervals >= distinct ? dyadic_intervals(n, d) : draw_intervals(n, cfg.intervals, d, cfg.seed);
  MeanContrast mc(y.values());
  IntervalSearch search(ivs, d, [&](int s, int b, int e) { return std::abs(mc(s, b, e)); });

  struct Node {
    double stat;
    int b, s, e;
    bool operator<(const Node& o) const { return stat < o.stat || (stat == o.stat && b > o.b); }
  };
  std::priority_queue<Node> heap;
  auto push = [&](int s, int e) {
    if (e - s + 1 < 2 * d) return;
    auto [c, where] = search.strongest(s, e);
    if (c.stat >= 0.0) heap.push({c.stat, c.b, s, e});
  };
  double logn = std::log(static_cast<double>(n));
  int kmax = std::min(n - 1, std::max(R + 1, static_cast<int>(std::ceil(2.0 * logn * logn))));
  std::vector<int> order;
  push(1, n);
  while (!heap.empty() && static_cast<int>(order.size()) < kmax) {
    Node top = heap.top();
    heap.pop();
    order.push_back(top.b);
    push(top.s, top.b - 1);
    push(top.b, top.e);
  }

  // Nested-model BIC and the gappy sequence.
  const SegmentStats& st = mc.stats();
  WcmResult out;
  std::vector<int> bounds{1, n + 1};
  double sse = st.rss(1, n);
  auto bic = [&](double v, int k) { return n * std::log(std::max(v / n, 1e-300)) + k * logn; };
  out.path_bic.push_back(bic(sse, 0));
  for (std::size_t k = 0; k < order.size(); ++k) {
    int b = order[k];
    auto it = std::upper_bound(bounds.begin(), bounds.end(), b);
    int e = *it - 1, s = *(it - 1);
    sse += st.rss(s, b - 1) + st.rss(b, e) - st.rss(s, e);
    bounds.insert(it, b);
    out.path_bic.push_back(bic(sse, static_cast<int>(k) + 1));
  }
  std::vector<std::pair<double, int>> gaps;
  for (std::size_t k = 1; k < out.path_bic.size(); ++k) {
    double g = out.path_bic[k - 1] - out.path_bic[k];
    if (g > 0.0) gaps.push_back({g, static_cast<int>(k)});
  }
  std::stable_sort(gaps.begin(), gaps.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::vector<int> sizes{0};
  for (int i = 0; i < std::min<int>(R, static_cast<int>(gaps.size())); ++i) sizes.push_back(gaps[i].second);
  std::sort(sizes.begin(), sizes.end());
  for (int k : sizes) {
    ChangepointVector m(order.begin(), order.begin() + k);
    std::sort(m.begin(), m.end());
    out.models.push_back(std::move(m));
  }

  // Phase 2: backward selection, phi always from the larger model.
  int pick = static_cast<int>(out.models.size()) - 1;
  ArFit ar = select_ar(y, out.models[pick]);
  while (pick > 0) {
    ar = select_ar(y, out.models[pick]);
    if (hi_survives(y, out.models[pick - 1], out.models[pick], ar)) break;
    --pick;
  }
  out.taus = out.models[pick];
  out.phi_hat = ar.coef.empty() ? 0.0 : ar.coef[0];
  out.order = static_cast<int>(ar.coef.size());
  return out;
}

}  // namespace changeforge
