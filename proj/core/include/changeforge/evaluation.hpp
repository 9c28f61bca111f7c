#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "changeforge/models.hpp"
#include "changeforge/series.hpp"

namespace changeforge {

struct DistanceResult {
  double distance = 0.0;
  std::vector<std::pair<int, int>> matches;  // (estimated, true)
  int missing = 0;                           // true changepoints left unmatched
  int extra = 0;                             // estimated changepoints left unmatched
};

// Minimum over partial one-to-one matchings of sum |tau_hat - tau| / n plus
// one per unmatched changepoint on either side.
DistanceResult tau_distance(const ChangepointVector& est, const ChangepointVector& truth, int n);

// Minimum-cost perfect assignment on a square matrix; returns column per row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

struct ScenarioSpec {
  int id = 1;
  int n = 0;                  // 0: 1000 for scenarios 1-10, 1200 for 11-14
  double sigma = 1.0;
  double jump = 2.0;
  double phi = 0.5;           // scenarios 4-5
  double alpha = 0.005;       // scenarios 6-7 and 13-14
  double slope = 0.01;        // scenarios 8-10
  int period = 12;
  double seasonal_amplitude = 1.5;
  bool randomized = false;    // scenario 7: random count, location, size and alpha
  int min_spacing = 0;        // randomized scenarios; 0: 100 scaled by n / 1000
  std::uint64_t seed = 1;
  ChangepointVector changepoints;  // overrides the scenario default when nonempty
};

struct ScenarioData {
  int id = 1;
  TimeSeries y;
  ChangepointVector taus;
  std::vector<double> signal;  // noiseless part
  ModelFamily family = ModelFamily::mean_shift;
  std::vector<std::pair<std::string, double>> globals;  // alpha, phi, s1.. as applicable
};

ModelFamily scenario_family(int id);
int scenario_default_n(int id);
ScenarioData simulate_scenario(const ScenarioSpec& spec);

struct RateEstimate {
  double rate = 0.0;
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Yearly rate 12 (b1 + 2 b2 t) from monthly coefficients, with the delta-method
// standard error and a 95% normal interval.
RateEstimate gls_rate_inference(double b1, double b2, double var_b1, double var_b2, double cov_b1b2, double t);

struct EvaluationRow {
  int scenario = 0;
  std::string method;
  std::uint64_t seed = 0;
  int m_hat = 0;
  double distance = 0.0;
  double bic = 0.0;
  double runtime_ms = 0.0;
};

// CSV with header scenario,method,seed,m_hat,distance,bic,runtime_ms; rows
// are sorted by (scenario, method, seed) first.
void write_report(std::ostream& os, std::vector<EvaluationRow> rows);

}  // namespace changeforge
