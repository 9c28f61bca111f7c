#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "changeforge/exact.hpp"

namespace changeforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sorted disjoint closed intervals on the real line.
using Span = std::pair<double, double>;
using SpanSet = std::vector<Span>;

SpanSet intersect(const SpanSet& a, double lo, double hi) {
  SpanSet out;
  for (auto [l, h] : a) {
    double L = std::max(l, lo), H = std::min(h, hi);
    if (L <= H) out.push_back({L, H});
  }
  return out;
}

// a minus the open interval (lo, hi); endpoints stay so ties are not lost.
SpanSet subtract(const SpanSet& a, double lo, double hi) {
  if (!(lo < hi)) return a;
  SpanSet out;
  for (auto [l, h] : a) {
    if (h <= lo || l >= hi) {
      out.push_back({l, h});
      continue;
    }
    if (l <= lo) out.push_back({l, lo});
    if (h >= hi) out.push_back({hi, h});
  }
  return out;
}

struct Cand {
  int r;
  SpanSet set;
};

}  // namespace

std::vector<SegmentationLevel> pruned_segment_neighbourhood(const TimeSeries& y, int m_max, PrunedSnStats* stats) {
  int n = y.n();
  if (m_max < 0 || m_max >= n) throw std::invalid_argument("m_max must lie in [0, n)");
  SegmentStats st(y.values());
  CostFunction rss;
  std::vector<std::vector<double>> F(m_max + 1, std::vector<double>(n + 2, kInf));
  std::vector<std::vector<int>> back(m_max + 1, std::vector<int>(n + 2, 0));
  for (int s = 2; s <= n + 1; ++s) F[0][s] = st.cost(1, s - 1, rss);
  if (stats) stats->candidates.assign(m_max, std::vector<int>(n + 2, 0));
  const double tol = 1e-9;

  for (int m = 1; m <= m_max; ++m) {
    const auto& prev = F[m - 1];
    std::vector<Cand> P;
    for (int s = m + 2; s <= n + 1; ++s) {
      // Candidate c = s - 1 is born: its quadratic is the constant prev[c]
      // until data from c onward is added, which every candidate shares.
      int c = s - 1;
      SpanSet born{{-kInf, kInf}};
      std::vector<Cand> kept;
      kept.reserve(P.size() + 1);
      for (auto& cand : P) {
        int r = cand.r;
        double len = c - r;
        double mean = st.mean(r, c - 1);
        double slack = prev[c] - prev[r] - st.rss(r, c - 1);
        double widen = tol * (std::abs(prev[c]) + 1.0);
        // {mu : q_r(mu) <= prev[c]}, widened to keep r, narrowed to shrink c
        double rad_keep = slack + widen >= 0.0 ? std::sqrt((slack + widen) / len) : -1.0;
        double rad_cut = slack - widen > 0.0 ? std::sqrt((slack - widen) / len) : -1.0;
        if (rad_cut > 0.0) born = subtract(born, mean - rad_cut, mean + rad_cut);
        cand.set = rad_keep >= 0.0 ? intersect(cand.set, mean - rad_keep, mean + rad_keep) : SpanSet{};
        if (!cand.set.empty()) kept.push_back(std::move(cand));
      }
      if (!born.empty()) kept.push_back({c, std::move(born)});
      P.swap(kept);
      if (stats) stats->candidates[m - 1][s] = static_cast<int>(P.size());

      double best = kInf;
      int arg = 0;
      for (const auto& cand : P) {
        double v = prev[cand.r] + st.cost(cand.r, s - 1, rss);
        if (v < best) {
          best = v;
          arg = cand.r;
        }
      }
      F[m][s] = best;
      back[m][s] = arg;
    }
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

}  // namespace changeforge
