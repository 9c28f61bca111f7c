#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "changeforge/series.hpp"

namespace changeforge {

struct AmocResult {
  double statistic = 0.0;
  int location = 0;
  double threshold = 0.0;
  bool reject = false;
};

enum class SegmentFamily { constant_mean, continuous_linear, linear, mean_variance };

SegmentFamily parse_segment_family(const std::string& token);
// Minimal observations per side for a split under the family.
int family_min_obs(SegmentFamily f);

// Brownian-bridge supremum quantiles; alpha in {0.10, 0.05, 0.025, 0.01, 0.001}.
double cusum_critical_value(double alpha);

// Scaled |CUSUM(k)| for k = 1..n (entry k-1); |C_k| / (sigma_hat sqrt n).
std::vector<double> cusum_profile(const TimeSeries& y);
AmocResult cusum_max_test(const TimeSeries& y, double alpha = 0.05);

// Weighted mean difference between [s, b-1] and [b, e].
double wbs_contrast(const TimeSeries& y, int s, int b, int e);

// Same contrast from prefix sums, for detectors that scan many intervals.
class MeanContrast {
 public:
  explicit MeanContrast(const std::vector<double>& y) : stats_(y) {}
  double operator()(int s, int b, int e) const;
  // argmax over s < b <= e of |C|, ties to the smallest b; returns (b, |C|).
  std::pair<int, double> best(int s, int e) const;
  const SegmentStats& stats() const { return stats_; }

 private:
  SegmentStats stats_;
};

struct GlrOptions {
  double variance = 0.0;  // > 0: known noise variance; 0: profile it out
  double cap = 1e12;
};

// Twice the log likelihood ratio of a split at b (first index of the right
// part) against the pooled fit on [s, e].
double glr_contrast(const TimeSeries& y, int s, int b, int e, SegmentFamily family,
                    const GlrOptions& opt = {});

// Split search on [s, e] over b in [s + d, e - d + 1]; returns (b, statistic).
std::pair<int, double> glr_best(const TimeSeries& y, int s, int e, SegmentFamily family,
                                const GlrOptions& opt = {});

// Reusable form of glr_contrast / glr_best that keeps its prefix sums.
class GlrScanner {
 public:
  GlrScanner(const TimeSeries& y, SegmentFamily family, GlrOptions opt = {});
  ~GlrScanner();
  GlrScanner(GlrScanner&&) noexcept;
  GlrScanner& operator=(GlrScanner&&) noexcept;

  double operator()(int s, int b, int e) const;
  std::pair<int, double> best(int s, int e) const;
  int min_obs() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Seasonal at-most-one mean shift test. The per-location F(1, df) quantile is
// taken at alpha divided by the number of scanned locations.
AmocResult fmax_seasonal(const TimeSeries& y, int period, double alpha = 0.05);
std::vector<double> fmax_profile(const TimeSeries& y, int period);  // F_tau for tau = 2..n

// Variance change in residuals y - mu_hat. statistic is 2 * (l(tau_hat) - l_0);
// threshold defaults to 2 log n.
AmocResult variance_amoc(const TimeSeries& y, const std::vector<double>& mu_hat,
                         double threshold = -1.0);
double variance_loglik(const std::vector<double>& resid, int tau);

}  // namespace changeforge
