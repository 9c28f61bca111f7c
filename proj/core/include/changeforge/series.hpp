#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace changeforge {

// Ordered observations. All index arithmetic in the library is origin-1:
// y(1) is the first value and a changepoint tau is the first index of the
// segment it opens.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(std::vector<double> values);  // NOLINT: implicit on purpose
  TimeSeries(std::initializer_list<double> values);

  int n() const { return static_cast<int>(values_.size()); }
  std::size_t size() const { return values_.size(); }
  double operator()(int t) const { return values_[static_cast<std::size_t>(t - 1)]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

using ChangepointVector = std::vector<int>;

// Throws std::invalid_argument unless taus is strictly increasing within [2, n].
void validate_changepoints(const ChangepointVector& taus, int n);

struct SegmentedFit {
  ChangepointVector taus;
  std::vector<double> means;  // one per segment, m + 1 entries
  double sse = 0.0;
  double loglik = 0.0;        // Gaussian profile log-likelihood at sigma^2 = sse / n
};

struct CostFunction {
  enum class Kind { rss, gaussian_nll };
  Kind kind = Kind::rss;
  double fixed_variance = 0.0;  // > 0 divides rss by it; 0 means profile the variance
};

// O(1) segment statistics after an O(n) pass. Data are centred before the
// compensated prefix sums are built so that rss on long series keeps its
// precision.
class SegmentStats {
 public:
  explicit SegmentStats(const std::vector<double>& y);

  int n() const { return n_; }
  double sum(int s, int e) const;   // sum of y_s..y_e, origin-1 inclusive
  double mean(int s, int e) const;
  double rss(int s, int e) const;
  double cost(int s, int e, const CostFunction& c) const;

 private:
  int n_;
  double shift_;
  std::vector<double> s1_;
  std::vector<double> s2_;
};

double rss_cost(const TimeSeries& y, int s, int e);
double segment_cost(const TimeSeries& y, int s, int e, const CostFunction& cost);

SegmentedFit piecewise_mean_fit(const TimeSeries& y, const ChangepointVector& taus);

double gaussian_profile_loglik(double sse, int n);

// Robust noise scale from first differences: median|y_{t+1} - y_t| / (0.6745 * sqrt 2).
double mad_sigma(const std::vector<double>& y);
double median(std::vector<double> v);

// One value per line, or "t,value" rows; a non-numeric first line is a header.
TimeSeries read_series_csv(const std::string& path);
void write_series_csv(const std::string& path, const std::vector<double>& y);

}  // namespace changeforge
