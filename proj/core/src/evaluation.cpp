#include "changeforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "changeforge/rng.hpp"

namespace changeforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Random changepoints with every segment (including the outer two) at least gap long.
ChangepointVector spaced_changepoints(SplitMix64& rng, int n, int m, int gap) {
  int slack = n - (m + 1) * gap;
  std::vector<int> u(m);
  for (auto& v : u) v = rng.uniform_int(0, slack);
  std::sort(u.begin(), u.end());
  ChangepointVector taus;
  for (int i = 0; i < m; ++i) taus.push_back(1 + (i + 1) * gap + u[i]);
  return taus;
}

int segment_of(const ChangepointVector& taus, int t) {
  return static_cast<int>(std::upper_bound(taus.begin(), taus.end(), t) - taus.begin());
}

}  // namespace

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  // Potentials form of the Kuhn-Munkres algorithm, O(k^3).
  int k = static_cast<int>(cost.size());
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != k) throw std::invalid_argument("assignment matrix must be square");
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0), minv(k + 1);
  std::vector<int> p(k + 1, 0), way(k + 1, 0);
  std::vector<char> used(k + 1);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col(k, -1);
  for (int j = 1; j <= k; ++j)
    if (p[j]) col[p[j] - 1] = j - 1;
  return col;
}

DistanceResult tau_distance(const ChangepointVector& est, const ChangepointVector& truth, int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  for (const auto* v : {&est, &truth})
    for (int t : *v)
      if (t < 1 || t > n) throw std::invalid_argument("changepoint index outside [1, n]");
  int a = static_cast<int>(est.size()), b = static_cast<int>(truth.size());
  int k = a + b;
  DistanceResult res;
  if (k == 0) return res;
  // Rows: estimates then dummies; columns: truths then dummies.
  std::vector<std::vector<double>> C(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      bool ri = i < a, cj = j < b;
      if (ri && cj)
        C[i][j] = std::abs(est[i] - truth[j]) / static_cast<double>(n);
      else if (ri || cj)
        C[i][j] = 1.0;
    }
  auto col = hungarian(C);
  std::vector<char> hit(b, 0);
  for (int i = 0; i < a; ++i) {
    if (col[i] < b) {
      res.matches.push_back({est[i], truth[col[i]]});
      hit[col[i]] = 1;
      res.distance += C[i][col[i]];
    } else {
      ++res.extra;
    }
  }
  for (int j = 0; j < b; ++j) res.missing += !hit[j];
  res.distance += res.missing + res.extra;
  return res;
}

ModelFamily scenario_family(int id) {
  switch (id) {
    case 1: case 2: case 3: return ModelFamily::mean_shift;
    case 4: case 5: return ModelFamily::ar1_mean_shift;
    case 6: case 7: return ModelFamily::fixed_trend;
    case 8: case 9: case 10: return ModelFamily::trend_shift;
    case 11: case 12: return ModelFamily::seasonal;
    case 13: case 14: return ModelFamily::seasonal_trend;
    default: throw std::invalid_argument("scenario id must lie in 1..14");
  }
}

int scenario_default_n(int id) {
  scenario_family(id);
  return id >= 11 ? 1200 : 1000;
}

ScenarioData simulate_scenario(const ScenarioSpec& spec) {
  ScenarioData out;
  out.id = spec.id;
  out.family = scenario_family(spec.id);
  int n = spec.n > 0 ? spec.n : scenario_default_n(spec.id);
  if (!(spec.sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  if (spec.id >= 11 && n <= spec.period + 2) throw std::invalid_argument("series too short for the period");
  if (n < 8) throw std::invalid_argument("scenario series need n >= 8");
  SplitMix64 rng(spec.seed);
  int gap = spec.min_spacing > 0 ? spec.min_spacing : std::max(2, static_cast<int>(std::lround(100.0 * n / 1000.0)));

  // Changepoints.
  ChangepointVector taus;
  std::vector<double> jumps;  // level change at each tau (mean-shift scenarios)
  bool random = spec.id == 10 || (spec.id == 7 && spec.randomized);
  double alpha = spec.alpha;
  if (!spec.changepoints.empty()) {
    taus = spec.changepoints;
  } else if (random) {
    int m = rng.uniform_int(1, 7);
    while (m > 0 && (m + 1) * gap > n) --m;
    taus = spaced_changepoints(rng, n, m, gap);
  } else {
    switch (spec.id) {
      case 2: case 5: case 7: case 12: case 14:
        taus = {n / 4 + 1, n / 2 + 1, 3 * n / 4 + 1};
        break;
      case 3: {
        const double len[] = {150, 50, 300, 250, 50, 200};
        int at = 1;
        for (int i = 0; i < 5; ++i) {
          at += static_cast<int>(std::lround(len[i] * n / 1000.0));
          taus.push_back(at);
        }
        break;
      }
      case 9:
        taus = {n / 4 + 2, n / 2 + 2, 3 * n / 4 + 2};
        break;
      default:
        break;
    }
  }
  validate_changepoints(taus, n);
  int m = static_cast<int>(taus.size());

  if (spec.id == 3 && spec.changepoints.empty()) {
    const double level[] = {0, 2, 0, -2, 0, 2};
    for (int i = 1; i <= 5; ++i) jumps.push_back((level[i] - level[i - 1]) * spec.jump / 2.0);
  } else if (spec.id == 7 && spec.randomized) {
    for (int i = 0; i < m; ++i) {
      double size = rng.uniform(1.5, 2.5);
      jumps.push_back(rng.uniform() < 0.5 ? -size : size);
    }
    const double alphas[] = {-0.01, -0.005, 0.005, 0.1};
    alpha = alphas[rng.uniform_int(0, 3)];
  } else {
    for (int i = 0; i < m; ++i) jumps.push_back(i % 2 == 0 ? spec.jump : -spec.jump);
  }
  std::vector<double> level(m + 1, 0.0);
  for (int i = 0; i < m; ++i) level[i + 1] = level[i] + jumps[i];

  std::vector<double> signal(n, 0.0), y(n, 0.0);
  switch (out.family) {
    case ModelFamily::mean_shift:
      for (int t = 1; t <= n; ++t) signal[t - 1] = level[segment_of(taus, t)];
      for (int t = 1; t <= n; ++t) y[t - 1] = signal[t - 1] + spec.sigma * rng.normal();
      break;
    case ModelFamily::ar1_mean_shift: {
      // Innovation form: the intercept is scaled so the process mean follows the levels.
      double phi = spec.phi;
      if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("phi must satisfy |phi| < 1");
      for (int t = 1; t <= n; ++t) {
        double lv = level[segment_of(taus, t)];
        signal[t - 1] = lv;
        double c = lv * (1.0 - phi);
        double e = spec.sigma * rng.normal();
        y[t - 1] = t == 1 ? c + e : c + phi * y[t - 2] + e;
      }
      out.globals.push_back({"phi", phi});
      break;
    }
    case ModelFamily::fixed_trend:
      for (int t = 1; t <= n; ++t) signal[t - 1] = alpha * t + level[segment_of(taus, t)];
      for (int t = 1; t <= n; ++t) y[t - 1] = signal[t - 1] + spec.sigma * rng.normal();
      out.globals.push_back({"alpha", alpha});
      break;
    case ModelFamily::trend_shift: {
      // Increment y_t - y_{t-1} uses the slope of the segment containing t.
      double sign = 1.0;
      if (spec.id == 10) sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      for (int t = 2; t <= n; ++t) {
        int seg = segment_of(taus, t);
        double s = spec.id == 8 ? spec.slope : sign * spec.slope * (seg % 2 == 0 ? 1.0 : -1.0);
        signal[t - 1] = signal[t - 2] + s;
      }
      for (int t = 1; t <= n; ++t) y[t - 1] = signal[t - 1] + spec.sigma * rng.normal();
      out.globals.push_back({"slope", spec.id == 8 ? spec.slope : sign * spec.slope});
      break;
    }
    case ModelFamily::seasonal:
    case ModelFamily::seasonal_trend: {
      int p = spec.period;
      std::vector<double> s(p);
      for (int j = 1; j <= p; ++j) s[j - 1] = spec.seasonal_amplitude * std::sin(2.0 * std::numbers::pi * j / p);
      bool trend = out.family == ModelFamily::seasonal_trend;
      for (int t = 1; t <= n; ++t)
        signal[t - 1] = (trend ? alpha * t : 0.0) + s[(t - 1) % p] + level[segment_of(taus, t)];
      for (int t = 1; t <= n; ++t) y[t - 1] = signal[t - 1] + spec.sigma * rng.normal();
      if (trend) out.globals.push_back({"alpha", alpha});
      for (int j = 1; j < p; ++j) out.globals.push_back({"s" + std::to_string(j), s[j - 1]});
      break;
    }
    case ModelFamily::quad_seasonal:
      throw std::logic_error("no scenario uses the quadratic seasonal family");
  }
  out.y = TimeSeries(std::move(y));
  out.signal = std::move(signal);
  out.taus = std::move(taus);
  return out;
}

RateEstimate gls_rate_inference(double b1, double b2, double var_b1, double var_b2, double cov_b1b2, double t) {
  if (var_b1 < 0.0 || var_b2 < 0.0) throw std::invalid_argument("variances must be nonnegative");
  double v = var_b1 + 4.0 * t * t * var_b2 + 4.0 * t * cov_b1b2;
  if (v < 0.0) {
    if (v > -1e-12 * (var_b1 + 4.0 * t * t * var_b2)) v = 0.0;
    else throw std::invalid_argument("covariance is not positive semidefinite");
  }
  RateEstimate r;
  r.rate = 12.0 * (b1 + 2.0 * b2 * t);
  r.se = 12.0 * std::sqrt(v);
  r.lo = r.rate - 1.96 * r.se;
  r.hi = r.rate + 1.96 * r.se;
  return r;
}

void write_report(std::ostream& os, std::vector<EvaluationRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const EvaluationRow& a, const EvaluationRow& b) {
    return std::tie(a.scenario, a.method, a.seed) < std::tie(b.scenario, b.method, b.seed);
  });
  auto prec = os.precision(10);
  os << "scenario,method,seed,m_hat,distance,bic,runtime_ms\n";
  for (const auto& r : rows)
    os << r.scenario << ',' << r.method << ',' << r.seed << ',' << r.m_hat << ',' << r.distance << ',' << r.bic << ','
       << r.runtime_ms << '\n';
  os.precision(prec);
}

}  // namespace changeforge
