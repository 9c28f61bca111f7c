#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "changeforge/amoc.hpp"
#include "changeforge/series.hpp"

namespace changeforge {

struct Interval {
  int s = 1;
  int e = 1;
  bool operator==(const Interval&) const = default;
};

struct DetectionConfig {
  std::optional<double> threshold;  // empty: detector default
  int intervals = 5000;             // M
  int min_segment = 1;
  int max_changepoints = -1;        // < 0: unlimited (WCM: R, default 5)
  std::uint64_t seed = 1;
};

// One accepted split, in the order the recursion found it.
struct SplitRecord {
  int tau;
  Interval segment;   // recursion segment being split
  Interval interval;  // interval whose contrast won
  double statistic;
};

struct DetectionResult {
  ChangepointVector taus;
  std::vector<SplitRecord> audit;
  double threshold = 0.0;
};

// Endpoints uniform with replacement; rejected until the interval holds at
// least 2 * min_segment points, at most 50 * M attempts.
std::vector<Interval> draw_intervals(int n, int M, int min_segment, std::uint64_t seed);

// Dyadic grid: lengths n, n/2, n/4, ... with half-length overlap.
std::vector<Interval> dyadic_intervals(int n, int min_segment);

// sigma_MAD * sqrt(2 log n)
double default_threshold(const TimeSeries& y);

DetectionResult binary_segmentation(const TimeSeries& y, const DetectionConfig& cfg = {});
DetectionResult wild_binary_segmentation(const TimeSeries& y, const DetectionConfig& cfg = {});

// Contrast is sqrt of the GLR with the noise variance fixed at sigma_MAD^2
// (the log-variance GLR for mean_variance). Default threshold sqrt(2 log n).
DetectionResult narrowest_over_threshold(const TimeSeries& y, const DetectionConfig& cfg = {},
                                         SegmentFamily family = SegmentFamily::constant_mean);

struct WcmResult {
  ChangepointVector taus;
  double phi_hat = 0.0;  // lag-1 coefficient of the fitted AR model
  int order = 1;
  std::vector<ChangepointVector> models;  // Theta_0 .. Theta_R
  std::vector<double> path_bic;           // nested-model BIC, k = 0..K
};

// With min_segment <= 1 WCM uses wcm_min_segment(n): the per-segment BIC is
// lenient on short segments, and unrestricted splits isolate single residuals.
int wcm_min_segment(int n);
WcmResult wcm(const TimeSeries& y, const DetectionConfig& cfg = {});

// Least-squares AR(p) fit on x; returns coefficients and residual SSE.
struct ArFit {
  std::vector<double> coef;
  double sse = 0.0;
  int used = 0;  // residuals counted
};
ArFit fit_ar(const std::vector<double>& x, int p);

}  // namespace changeforge
