#include "changeforge/series.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace changeforge {

namespace {

void check_values(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("time series must have at least one value");
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("time series contains a non-finite value");
}

void check_range(int s, int e, int n) {
  if (s < 1 || e > n || s > e)
    throw std::out_of_range("segment [" + std::to_string(s) + ", " + std::to_string(e) +
                            "] outside [1, " + std::to_string(n) + "]");
}

// Neumaier running sum; returns prefix totals with the compensation folded in.
std::vector<double> compensated_prefix(const std::vector<double>& v) {
  std::vector<double> out(v.size() + 1, 0.0);
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double t = sum + v[i];
    if (std::abs(sum) >= std::abs(v[i]))
      comp += (sum - t) + v[i];
    else
      comp += (v[i] - t) + sum;
    sum = t;
    out[i + 1] = sum + comp;
  }
  return out;
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  check_values(values_);
}

TimeSeries::TimeSeries(std::initializer_list<double> values) : values_(values) {
  check_values(values_);
}

void validate_changepoints(const ChangepointVector& taus, int n) {
  int prev = 1;
  for (int t : taus) {
    if (t < 2 || t > n) throw std::out_of_range("changepoint " + std::to_string(t) + " outside [2, n]");
    if (t <= prev) throw std::invalid_argument("changepoints must be strictly increasing");
    prev = t;
  }
}

SegmentStats::SegmentStats(const std::vector<double>& y) : n_(static_cast<int>(y.size())), shift_(0.0) {
  if (!y.empty()) {
    double acc = 0.0;
    for (double v : y) acc += v;
    shift_ = acc / static_cast<double>(y.size());
  }
  std::vector<double> c(y.size()), c2(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    c[i] = y[i] - shift_;
    c2[i] = c[i] * c[i];
  }
  s1_ = compensated_prefix(c);
  s2_ = compensated_prefix(c2);
}

double SegmentStats::sum(int s, int e) const {
  return s1_[e] - s1_[s - 1] + shift_ * (e - s + 1);
}

double SegmentStats::mean(int s, int e) const {
  return (s1_[e] - s1_[s - 1]) / (e - s + 1) + shift_;
}

double SegmentStats::rss(int s, int e) const {
  double a = s1_[e] - s1_[s - 1];
  double b = s2_[e] - s2_[s - 1];
  double r = b - a * a / (e - s + 1);
  return r > 0.0 ? r : 0.0;
}

double SegmentStats::cost(int s, int e, const CostFunction& c) const {
  double r = rss(s, e);
  if (c.kind == CostFunction::Kind::rss) return c.fixed_variance > 0.0 ? r / c.fixed_variance : r;
  if (c.fixed_variance > 0.0) return r / c.fixed_variance;
  double len = e - s + 1;
  return len * std::log(std::max(r / len, 1e-300));
}

double rss_cost(const TimeSeries& y, int s, int e) {
  check_range(s, e, y.n());
  double m = 0.0;
  for (int t = s; t <= e; ++t) m += y(t);
  m /= (e - s + 1);
  double r = 0.0;
  for (int t = s; t <= e; ++t) r += (y(t) - m) * (y(t) - m);
  return r;
}

double segment_cost(const TimeSeries& y, int s, int e, const CostFunction& cost) {
  check_range(s, e, y.n());
  SegmentStats st(std::vector<double>(y.values().begin() + (s - 1), y.values().begin() + e));
  return st.cost(1, e - s + 1, cost);
}

double gaussian_profile_loglik(double sse, int n) {
  double s2 = std::max(sse / n, 1e-300);
  return -0.5 * n * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
}

SegmentedFit piecewise_mean_fit(const TimeSeries& y, const ChangepointVector& taus) {
  validate_changepoints(taus, y.n());
  SegmentedFit fit;
  fit.taus = taus;
  int start = 1;
  for (std::size_t i = 0; i <= taus.size(); ++i) {
    int end = i < taus.size() ? taus[i] - 1 : y.n();
    double m = 0.0;
    for (int t = start; t <= end; ++t) m += y(t);
    m /= (end - start + 1);
    for (int t = start; t <= end; ++t) fit.sse += (y(t) - m) * (y(t) - m);
    fit.means.push_back(m);
    start = end + 1;
  }
  fit.loglik = gaussian_profile_loglik(fit.sse, y.n());
  return fit;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sequence");
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

double mad_sigma(const std::vector<double>& y) {
  if (y.size() < 2) return 0.0;
  std::vector<double> d(y.size() - 1);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) d[i] = std::abs(y[i + 1] - y[i]);
  return median(std::move(d)) / (0.6744897501960817 * std::numbers::sqrt2);
}

TimeSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string field = line;
    auto comma = line.find(',');
    if (comma != std::string::npos) field = line.substr(comma + 1);
    std::istringstream ss(field);
    double v;
    if (!(ss >> v)) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("malformed value in " + path + ": " + line);
    }
    first = false;
    values.push_back(v);
  }
  return TimeSeries(std::move(values));
}

void write_series_csv(const std::string& path, const std::vector<double>& y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "t,value\n";
  for (std::size_t i = 0; i < y.size(); ++i) out << (i + 1) << ',' << y[i] << '\n';
}

}  // namespace changeforge
