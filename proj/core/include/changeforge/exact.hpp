#pragma once

#include <vector>

#include "changeforge/series.hpp"

namespace changeforge {

struct PartitionOptions {
  double beta = 0.0;
  double K = 0.0;       // PELT split-gain constant; 0 is valid for RSS
  int min_segment = 1;
  double tie_tol = 1e-10;  // relative; costs this close count as a tie
};

struct PartitionResult {
  ChangepointVector taus;
  // F(n+1) with F(1) = -beta: sum of segment costs + beta * m.
  double cost = 0.0;
  // cost + beta: one penalty per segment.
  double per_segment_cost = 0.0;
  std::vector<int> candidate_sizes;  // |R_s| for s = 2..n+1 (OP: s - 1)
  long long pruned = 0;
};

// Ties go to fewer changepoints, then to the smaller last changepoint.
PartitionResult optimal_partition(const TimeSeries& y, const CostFunction& cost, const PartitionOptions& opt);
PartitionResult pelt(const TimeSeries& y, const CostFunction& cost, const PartitionOptions& opt);

// Exhaustive search over all 2^(n-1) configurations; n <= 20.
PartitionResult exhaustive_partition(const TimeSeries& y, const CostFunction& cost, double beta);

struct SegmentationLevel {
  int m = 0;
  ChangepointVector taus;
  double cost = 0.0;  // F_m(n+1)
};

std::vector<SegmentationLevel> segment_neighbourhood(const TimeSeries& y, const CostFunction& cost, int m_max);

struct PrunedSnStats {
  // candidates[m-1][s] = candidate count for level m when reaching s
  std::vector<std::vector<int>> candidates;
};

// Squared-error cost with functional pruning on intervals of mu.
std::vector<SegmentationLevel> pruned_segment_neighbourhood(const TimeSeries& y, int m_max,
                                                            PrunedSnStats* stats = nullptr);

struct CpopOptions {
  double beta = 0.0;
  double sigma2 = 0.0;            // <= 0: estimate from second differences
  std::vector<double> h;          // h(1..n) as h[len - 1]; empty: h = 0
};

struct CpopResult {
  ChangepointVector taus;      // interior knots
  std::vector<int> knots;      // 0, taus..., n
  std::vector<double> values;  // fitted value at each knot
  double cost = 0.0;           // RSS / sigma2 + beta * m + sum h
  double sigma2 = 0.0;
  std::vector<double> fitted;  // n values
  int max_candidates = 0;
};

double cpop_default_sigma2(const TimeSeries& y);
CpopResult cpop(const TimeSeries& y, const CpopOptions& opt);

struct Ar1SegResult {
  ChangepointVector taus;
  double phi_tilde = 0.0;
  std::vector<double> deltas;  // per-segment intercepts of the filtered series
  std::vector<double> bic;     // per candidate model m = 0..m_max
};

double ar1seg_phi(const TimeSeries& y);
Ar1SegResult ar1seg(const TimeSeries& y, int m_max);

}  // namespace changeforge
