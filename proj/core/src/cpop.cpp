#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "changeforge/exact.hpp"

namespace changeforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a phi^2 + b phi + c
struct Quad {
  double a = 0.0, b = 0.0, c = 0.0;
  double at(double x) const { return (a * x + b) * x + c; }
  double argmin() const { return a > 0.0 ? -b / (2.0 * a) : 0.0; }
  double min() const { return a > 0.0 ? c - b * b / (4.0 * a) : (b == 0.0 ? c : -kInf); }
};

// Prefix sums of y, t*y and y^2.
struct Prefix {
  std::vector<double> y, ty, yy;
  explicit Prefix(const TimeSeries& s) : y(s.n() + 1, 0.0), ty(s.n() + 1, 0.0), yy(s.n() + 1, 0.0) {
    for (int t = 1; t <= s.n(); ++t) {
      y[t] = y[t - 1] + s(t);
      ty[t] = ty[t - 1] + t * s(t);
      yy[t] = yy[t - 1] + s(t) * s(t);
    }
  }
};

// Sums for the line from (s, phi') to (t, phi) over the points s+1..t,
// with weight w = (u - s) / L on phi.
struct SegmentTerms {
  double s11, s12, s22;  // sum (1-w)^2, sum w(1-w), sum w^2
  double s1y, s2y, syy;  // sum (1-w)y, sum w y, sum y^2
};

SegmentTerms terms(const Prefix& p, int s, int t) {
  double L = t - s;
  SegmentTerms r;
  double sw = (L + 1.0) / 2.0;
  r.s22 = (L + 1.0) * (2.0 * L + 1.0) / (6.0 * L);
  r.s11 = (L - 1.0) * (2.0 * L - 1.0) / (6.0 * L);
  r.s12 = sw - r.s22;
  double sy = p.y[t] - p.y[s];
  double sty = p.ty[t] - p.ty[s];
  r.s2y = (sty - s * sy) / L;
  r.s1y = sy - r.s2y;
  r.syy = p.yy[t] - p.yy[s];
  return r;
}

struct Node {
  int knot;     // last knot position
  int parent;   // -1 for the root
  Quad g;       // optimal cost up to the knot, as a function of its value
};

// Cost of y_{1:t} ending at phi given the node, minimised over the knot value.
// Also returns the minimising knot value as an affine map of phi.
Quad extend(const Node& nd, const SegmentTerms& T, double inv_s2, double extra, double* k0 = nullptr,
            double* k1 = nullptr) {
  double P = nd.g.a + T.s11 * inv_s2;
  double q0 = nd.g.b - 2.0 * T.s1y * inv_s2;
  double q1 = 2.0 * T.s12 * inv_s2;
  Quad out;
  out.a = T.s22 * inv_s2;
  out.b = -2.0 * T.s2y * inv_s2;
  out.c = nd.g.c + T.syy * inv_s2 + extra;
  if (P > 0.0) {
    out.a -= q1 * q1 / (4.0 * P);
    out.b -= 2.0 * q0 * q1 / (4.0 * P);
    out.c -= q0 * q0 / (4.0 * P);
    if (k0) *k0 = -q0 / (2.0 * P);
    if (k1) *k1 = -q1 / (2.0 * P);
  } else {
    if (k0) *k0 = 0.0;
    if (k1) *k1 = 0.0;
  }
  out.a = std::max(out.a, 0.0);
  return out;
}

// Smallest x > from where d = q - cur turns negative; +inf if none.
double crossing(const Quad& q, const Quad& cur, double from) {
  double A = q.a - cur.a, B = q.b - cur.b, C = q.c - cur.c;
  double scale = std::max({std::abs(q.a), std::abs(cur.a), 1e-300});
  if (std::abs(A) <= 1e-13 * scale) {
    if (B >= 0.0) return kInf;
    double x = -C / B;
    return x > from ? x : kInf;
  }
  double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return kInf;
  double sq = std::sqrt(disc);
  double qq = -0.5 * (B + (B >= 0 ? sq : -sq));
  double r1 = qq / A, r2 = C / qq;
  if (r1 > r2) std::swap(r1, r2);
  double x = A > 0.0 ? r1 : r2;
  return x > from ? x : kInf;
}

}  // namespace

double cpop_default_sigma2(const TimeSeries& y) {
  if (y.n() < 4) throw std::invalid_argument("CPOP variance estimate needs n >= 4");
  std::vector<double> d;
  for (int t = 1; t + 2 <= y.n(); ++t) d.push_back(std::abs(y(t + 2) - 2.0 * y(t + 1) + y(t)));
  double s = median(d) / 0.6744897501960817;
  return s * s / 6.0;
}

CpopResult cpop(const TimeSeries& y, const CpopOptions& opt) {
  int n = y.n();
  if (n < 2) throw std::invalid_argument("CPOP needs n >= 2");
  CpopResult res;
  res.sigma2 = opt.sigma2 > 0.0 ? opt.sigma2 : cpop_default_sigma2(y);
  if (!(res.sigma2 > 0.0)) throw std::invalid_argument("CPOP noise variance must be positive");
  if (!(opt.beta >= 0.0)) throw std::invalid_argument("CPOP penalty must be nonnegative");
  auto h = [&](int len) { return opt.h.empty() ? 0.0 : opt.h.at(static_cast<std::size_t>(len - 1)); };
  double inv = 1.0 / res.sigma2;
  double K = 2.0 * opt.beta + h(1) + h(n);
  Prefix pre(y);

  std::vector<Node> nodes{{0, -1, Quad{}}};
  std::vector<int> active{0};
  std::vector<Quad> f;
  for (int t = 1; t <= n; ++t) {
    f.resize(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      const Node& nd = nodes[active[i]];
      double extra = h(t - nd.knot) + (nd.parent < 0 ? 0.0 : opt.beta);
      f[i] = extend(nd, terms(pre, nd.knot, t), inv, extra);
    }
    res.max_candidates = std::max(res.max_candidates, static_cast<int>(active.size()));
    if (t == n) break;

    // Lower envelope over phi; candidates on it spawn a knot at t.
    std::vector<char> on(active.size(), 0);
    std::size_t cur = 0;
    for (std::size_t i = 1; i < active.size(); ++i) {
      const Quad &a = f[i], &b = f[cur];
      if (a.a < b.a || (a.a == b.a && (a.b > b.b || (a.b == b.b && a.c < b.c)))) cur = i;
    }
    double x = -kInf;
    std::vector<char> alive(active.size(), 1);
    for (std::size_t guard = 0; guard <= 2 * active.size() + 2; ++guard) {
      on[cur] = 1;
      double best = kInf;
      std::size_t nxt = cur;
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (i == cur || !alive[i]) continue;
        double c = crossing(f[i], f[cur], x);
        if (c == kInf) {
          alive[i] = 0;
          continue;
        }
        if (c < best) {
          best = c;
          nxt = i;
        }
      }
      if (nxt == cur) break;
      x = best;
      cur = nxt;
    }

    double fmin = kInf;
    for (const auto& q : f) fmin = std::min(fmin, q.min());
    std::vector<int> next;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (f[i].min() <= fmin + K + 1e-9 * std::abs(fmin)) next.push_back(active[i]);
    if (std::isfinite(opt.beta))
      for (std::size_t i = 0; i < active.size(); ++i)
        if (on[i]) {
          nodes.push_back({t, active[i], f[i]});
          next.push_back(static_cast<int>(nodes.size()) - 1);
        }
    active.swap(next);
  }

  std::size_t arg = 0;
  for (std::size_t i = 1; i < active.size(); ++i)
    if (f[i].min() < f[arg].min()) arg = i;
  res.cost = f[arg].min();

  // Walk back through the knots recovering their values.
  double phi = f[arg].argmin();
  int t = n;
  std::vector<std::pair<int, double>> knots{{n, phi}};
  for (int id = active[arg]; id >= 0; id = nodes[id].parent) {
    const Node& nd = nodes[id];
    double k0, k1;
    extend(nd, terms(pre, nd.knot, t), inv, 0.0, &k0, &k1);
    phi = k0 + k1 * phi;
    if (nd.parent < 0 && nd.g.a == 0.0 && terms(pre, nd.knot, t).s11 == 0.0) phi = knots.back().second;
    knots.push_back({nd.knot, phi});
    t = nd.knot;
  }
  std::reverse(knots.begin(), knots.end());
  for (auto [k, v] : knots) {
    res.knots.push_back(k);
    res.values.push_back(v);
  }
  for (std::size_t i = 1; i + 1 < res.knots.size(); ++i) res.taus.push_back(res.knots[i]);
  res.fitted.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < res.knots.size(); ++i) {
    int s = res.knots[i], e = res.knots[i + 1];
    for (int u = s + 1; u <= e; ++u) {
      double w = double(u - s) / (e - s);
      res.fitted[u - 1] = (1.0 - w) * res.values[i] + w * res.values[i + 1];
    }
  }
  return res;
}

}  // namespace changeforge
