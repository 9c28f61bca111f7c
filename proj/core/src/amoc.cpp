#include "changeforge/amoc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace changeforge {

namespace {

// Prefix sums for O(1) least-squares line fits over [s, e]. Times are
// shifted to the interval start before fitting.
class LineStats {
 public:
  explicit LineStats(const std::vector<double>& y) : n_(static_cast<int>(y.size())) {
    st_.assign(n_ + 1, 0.0);
    stt_.assign(n_ + 1, 0.0);
    sy_.assign(n_ + 1, 0.0);
    sty_.assign(n_ + 1, 0.0);
    syy_.assign(n_ + 1, 0.0);
    for (int t = 1; t <= n_; ++t) {
      double v = y[t - 1];
      st_[t] = st_[t - 1] + t;
      stt_[t] = stt_[t - 1] + double(t) * t;
      sy_[t] = sy_[t - 1] + v;
      sty_[t] = sty_[t - 1] + t * v;
      syy_[t] = syy_[t - 1] + v * v;
    }
  }

  struct Sums {
    double len, t, tt, y, ty, yy;
  };

  // Sums over [s, e] with time measured from origin a.
  Sums sums(int s, int e, double a) const {
    Sums r;
    r.len = e - s + 1;
    double t = st_[e] - st_[s - 1], tt = stt_[e] - stt_[s - 1];
    r.y = sy_[e] - sy_[s - 1];
    r.yy = syy_[e] - syy_[s - 1];
    double ty = sty_[e] - sty_[s - 1];
    r.t = t - a * r.len;
    r.tt = tt - 2.0 * a * t + a * a * r.len;
    r.ty = ty - a * r.y;
    return r;
  }

  double rss_mean(int s, int e) const {
    Sums q = sums(s, e, 0.0);
    return std::max(0.0, q.yy - q.y * q.y / q.len);
  }

  double rss_line(int s, int e) const {
    Sums q = sums(s, e, s);
    double ctt = q.tt - q.t * q.t / q.len;
    double cty = q.ty - q.t * q.y / q.len;
    double cyy = q.yy - q.y * q.y / q.len;
    double r = ctt > 0.0 ? cyy - cty * cty / ctt : cyy;
    return std::max(0.0, r);
  }

  // Continuous fit on [s, e] with a slope change starting at b (hinge at b-1).
  double rss_hinge(int s, int b, int e) const {
    Sums a = sums(s, e, s);
    double c = b - 1;
    Sums h = sums(b, e, c);  // hinge u = t - c on [b, e], zero before
    double su = h.t, suu = h.tt, suy = h.ty;
    // u * (t - s) = u * (u + c - s)
    double sut = suu + (c - s) * su;
    Eigen::Matrix3d G;
    G << a.len, a.t, su, a.t, a.tt, sut, su, sut, suu;
    Eigen::Vector3d r(a.y, a.ty, suy);
    Eigen::Vector3d coef = G.ldlt().solve(r);
    double rss = a.yy - coef.dot(r);
    return std::max(0.0, rss);
  }

 private:
  int n_;
  std::vector<double> st_, stt_, sy_, sty_, syy_;
};

double log_ratio(double num, double den, double scale, double cap) {
  if (den <= 0.0) return num <= 0.0 ? 0.0 : cap;
  if (num <= den) return 0.0;
  return std::min(cap, scale * std::log(num / den));
}

double glr_from_stats(const LineStats& ls, int s, int b, int e, SegmentFamily family, const GlrOptions& opt) {
  double len = e - s + 1;
  double n1 = b - s, n2 = e - b + 1;
  double rss0 = 0.0, rss1 = 0.0;
  switch (family) {
    case SegmentFamily::constant_mean:
      rss0 = ls.rss_mean(s, e);
      rss1 = ls.rss_mean(s, b - 1) + ls.rss_mean(b, e);
      break;
    case SegmentFamily::linear:
      rss0 = ls.rss_line(s, e);
      rss1 = ls.rss_line(s, b - 1) + ls.rss_line(b, e);
      break;
    case SegmentFamily::continuous_linear:
      rss0 = ls.rss_line(s, e);
      rss1 = std::min(rss0, ls.rss_hinge(s, b, e));
      break;
    case SegmentFamily::mean_variance: {
      double v0 = ls.rss_mean(s, e) / len;
      double v1 = ls.rss_mean(s, b - 1) / n1;
      double v2 = ls.rss_mean(b, e) / n2;
      if (v1 <= 0.0 || v2 <= 0.0) return v0 <= 0.0 ? 0.0 : opt.cap;
      double g = len * std::log(v0) - n1 * std::log(v1) - n2 * std::log(v2);
      return std::clamp(g, 0.0, opt.cap);
    }
  }
  rss1 = std::min(rss1, rss0);
  if (opt.variance > 0.0) return std::min(opt.cap, (rss0 - rss1) / opt.variance);
  return log_ratio(rss0, rss1, len, opt.cap);
}

void check_split(int s, int b, int e, int d, int n) {
  if (s < 1 || e > n || b - s < d || e - b + 1 < d)
    throw std::invalid_argument("split outside the admissible range for the interval");
}

}  // namespace

SegmentFamily parse_segment_family(const std::string& token) {
  if (token == "constant_mean" || token == "mean") return SegmentFamily::constant_mean;
  if (token == "continuous_linear" || token == "kink") return SegmentFamily::continuous_linear;
  if (token == "linear") return SegmentFamily::linear;
  if (token == "mean_variance" || token == "meanvar") return SegmentFamily::mean_variance;
  throw std::invalid_argument("unsupported segment family: " + token);
}

int family_min_obs(SegmentFamily f) {
  switch (f) {
    case SegmentFamily::constant_mean: return 1;
    case SegmentFamily::continuous_linear: return 2;
    case SegmentFamily::linear: return 2;
    case SegmentFamily::mean_variance: return 2;
  }
  return 1;
}

double cusum_critical_value(double alpha) {
  static const std::pair<double, double> table[] = {
      {0.10, 1.224}, {0.05, 1.358}, {0.025, 1.480}, {0.01, 1.628}, {0.001, 1.949}};
  for (auto [a, c] : table)
    if (std::abs(alpha - a) < 1e-12) return c;
  throw std::invalid_argument("alpha must be one of 0.10, 0.05, 0.025, 0.01, 0.001");
}

std::vector<double> cusum_profile(const TimeSeries& y) {
  int n = y.n();
  if (n < 3) throw std::invalid_argument("CUSUM needs n >= 3");
  double mean = 0.0;
  for (double v : y.values()) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : y.values()) ss += (v - mean) * (v - mean);
  double sigma = std::sqrt(ss / (n - 1));
  if (!(sigma > 0.0)) throw std::domain_error("CUSUM undefined for a zero-variance series");
  std::vector<double> out(n);
  double c = 0.0;
  double scale = sigma * std::sqrt(double(n));
  for (int k = 1; k <= n; ++k) {
    c += y(k) - mean;  // C_k = partial sum - (k/n) total
    out[k - 1] = std::abs(c) / scale;
  }
  out[n - 1] = 0.0;
  return out;
}

AmocResult cusum_max_test(const TimeSeries& y, double alpha) {
  AmocResult r;
  r.threshold = cusum_critical_value(alpha);
  auto prof = cusum_profile(y);
  r.location = 2;
  r.statistic = -1.0;
  for (int k = 2; k <= y.n(); ++k)
    if (prof[k - 1] > r.statistic) {
      r.statistic = prof[k - 1];
      r.location = k;
    }
  r.reject = r.statistic > r.threshold;
  return r;
}

double wbs_contrast(const TimeSeries& y, int s, int b, int e) {
  if (s < 1 || e > y.n() || !(s < b && b <= e)) throw std::invalid_argument("wbs_contrast needs s < b <= e");
  double l = 0.0, r = 0.0;
  for (int t = s; t < b; ++t) l += y(t);
  for (int t = b; t <= e; ++t) r += y(t);
  double n1 = b - s, n2 = e - b + 1;
  return std::sqrt(n1 * n2 / (n1 + n2)) * (l / n1 - r / n2);
}

double MeanContrast::operator()(int s, int b, int e) const {
  double n1 = b - s, n2 = e - b + 1;
  return std::sqrt(n1 * n2 / (n1 + n2)) * (stats_.mean(s, b - 1) - stats_.mean(b, e));
}

std::pair<int, double> MeanContrast::best(int s, int e) const {
  int arg = s + 1;
  double val = -1.0;
  for (int b = s + 1; b <= e; ++b) {
    double c = std::abs((*this)(s, b, e));
    if (c > val) {
      val = c;
      arg = b;
    }
  }
  return {arg, val};
}

struct GlrScanner::Impl {
  LineStats ls;
  SegmentFamily family;
  GlrOptions opt;
  int n;
};

GlrScanner::GlrScanner(const TimeSeries& y, SegmentFamily family, GlrOptions opt)
    : impl_(std::make_unique<Impl>(Impl{LineStats(y.values()), family, opt, y.n()})) {}
GlrScanner::~GlrScanner() = default;
GlrScanner::GlrScanner(GlrScanner&&) noexcept = default;
GlrScanner& GlrScanner::operator=(GlrScanner&&) noexcept = default;

int GlrScanner::min_obs() const { return family_min_obs(impl_->family); }

double GlrScanner::operator()(int s, int b, int e) const {
  check_split(s, b, e, min_obs(), impl_->n);
  return glr_from_stats(impl_->ls, s, b, e, impl_->family, impl_->opt);
}

std::pair<int, double> GlrScanner::best(int s, int e) const {
  int d = min_obs();
  if (s < 1 || e > impl_->n || e - s + 1 < 2 * d)
    throw std::invalid_argument("interval shorter than twice the family minimum");
  int arg = s + d;
  double val = -1.0;
  for (int b = s + d; b <= e - d + 1; ++b) {
    double g = glr_from_stats(impl_->ls, s, b, e, impl_->family, impl_->opt);
    if (g > val) {
      val = g;
      arg = b;
    }
  }
  return {arg, val};
}

double glr_contrast(const TimeSeries& y, int s, int b, int e, SegmentFamily family, const GlrOptions& opt) {
  return GlrScanner(y, family, opt)(s, b, e);
}

std::pair<int, double> glr_best(const TimeSeries& y, int s, int e, SegmentFamily family, const GlrOptions& opt) {
  return GlrScanner(y, family, opt).best(s, e);
}

std::vector<double> fmax_profile(const TimeSeries& y, int period) {
  int n = y.n(), p = period;
  if (p < 2) throw std::invalid_argument("period must be at least 2");
  if (n < 2 * p + 2) throw std::invalid_argument("series too short for the seasonal F test");
  // Null design: intercept plus p-1 sum-to-zero seasonal columns.
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, p);
  for (int t = 0; t < n; ++t) {
    X(t, 0) = 1.0;
    int phase = t % p;
    if (phase < p - 1)
      X(t, 1 + phase) = 1.0;
    else
      X.row(t).segment(1, p - 1).setConstant(-1.0);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  Eigen::Map<const Eigen::VectorXd> yv(y.values().data(), n);
  Eigen::VectorXd r0 = yv - Q * (Q.transpose() * yv);
  double sse0 = r0.squaredNorm();
  double df = n - (p + 1);
  double tiny = 1e-14 * std::max(1.0, yv.squaredNorm());

  std::vector<double> F(n + 1, 0.0);
  Eigen::VectorXd qz = Eigen::VectorXd::Zero(p);
  double zr = 0.0;
  for (int tau = n; tau >= 2; --tau) {
    qz += Q.row(tau - 1).transpose();
    zr += r0(tau - 1);
    double zz = (n - tau + 1) - qz.squaredNorm();
    double gain = zz > 1e-12 ? zr * zr / zz : 0.0;
    double sseA = std::max(0.0, sse0 - gain);
    double f;
    if (sseA <= tiny)
      f = gain <= tiny ? 0.0 : 1e12;
    else
      f = std::max(0.0, sse0 - sseA) / (sseA / df);
    F[tau] = f;
  }
  return std::vector<double>(F.begin() + 2, F.end());
}

AmocResult fmax_seasonal(const TimeSeries& y, int period, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  auto prof = fmax_profile(y, period);
  int n = y.n();
  AmocResult r;
  r.statistic = -1.0;
  for (int tau = 2; tau <= n; ++tau)
    if (prof[tau - 2] > r.statistic) {
      r.statistic = prof[tau - 2];
      r.location = tau;
    }
  double df = n - (period + 1);
  boost::math::fisher_f dist(1.0, df);
  r.threshold = boost::math::quantile(boost::math::complement(dist, alpha / (n - 1)));
  r.reject = r.statistic > r.threshold;
  return r;
}

double variance_loglik(const std::vector<double>& resid, int tau) {
  int n = static_cast<int>(resid.size());
  double a = 0.0, b = 0.0;
  for (int t = 1; t < tau; ++t) a += resid[t - 1] * resid[t - 1];
  for (int t = tau; t <= n; ++t) b += resid[t - 1] * resid[t - 1];
  double n1 = tau - 1, n2 = n - tau + 1;
  if (a <= 0.0 || b <= 0.0) throw std::domain_error("zero segment variance");
  return -0.5 * n1 * std::log(a / n1) - 0.5 * n2 * std::log(b / n2);
}

AmocResult variance_amoc(const TimeSeries& y, const std::vector<double>& mu_hat, double threshold) {
  int n = y.n();
  if (static_cast<int>(mu_hat.size()) != n) throw std::invalid_argument("mu_hat length must match y");
  if (n < 4) throw std::invalid_argument("variance AMOC needs n >= 4");
  std::vector<double> r(n), pre(n + 1, 0.0);
  for (int t = 1; t <= n; ++t) {
    r[t - 1] = y(t) - mu_hat[t - 1];
    pre[t] = pre[t - 1] + r[t - 1] * r[t - 1];
  }
  double total = pre[n];
  if (total <= 0.0) throw std::domain_error("zero segment variance");
  double l0 = -0.5 * n * std::log(total / n);
  AmocResult res;
  res.statistic = -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  for (int tau = 3; tau <= n - 1; ++tau) {
    double a = pre[tau - 1], b = total - pre[tau - 1];
    double n1 = tau - 1, n2 = n - tau + 1;
    if (a <= 0.0 || b <= 0.0) throw std::domain_error("zero segment variance");
    double l = -0.5 * n1 * std::log(a / n1) - 0.5 * n2 * std::log(b / n2);
    if (l > best) {
      best = l;
      res.location = tau;
    }
  }
  res.statistic = 2.0 * (best - l0);
  res.threshold = threshold >= 0.0 ? threshold : 2.0 * std::log(double(n));
  res.reject = res.statistic > res.threshold;
  return res;
}

}  // namespace changeforge
