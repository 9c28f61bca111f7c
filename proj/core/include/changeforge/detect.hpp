#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "changeforge/irfl.hpp"
#include "changeforge/models.hpp"
#include "changeforge/series.hpp"

namespace changeforge {

// Uniform front end over every 1D detector, shared by the CLI and the evaluation harness.

struct MethodParams {
  std::optional<double> beta;       // op, pelt, cpop: penalty per changepoint
  std::optional<double> threshold;  // bs, wbs, not
  double alpha = 0.05;              // cusum, fmax
  int intervals = 5000;             // wbs, not, wcm
  int max_changepoints = 5;         // wcm R
  int m_max = 10;                   // sn, ar1seg
  int period = 12;
  std::uint64_t seed = 1;
  IrflConfig irfl;
};

struct MethodOutput {
  std::string method;
  ModelFamily family = ModelFamily::mean_shift;
  ChangepointVector taus;
  std::vector<std::pair<std::string, double>> coefficients;
  std::vector<double> fitted;
  double bic = 0.0;
  int m_hat = 0;
};

class IncompatibleMethod : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& method_names();
bool method_supports(const std::string& method, ModelFamily family);

// Throws IncompatibleMethod when the method cannot estimate the family and
// std::invalid_argument for unknown methods.
MethodOutput run_method(const std::string& method, ModelFamily family, const TimeSeries& y,
                        const MethodParams& params = {});

// n log(SSE/n) + m log n of the piecewise-constant fit at taus.
double mean_shift_bic(const TimeSeries& y, const ChangepointVector& taus);

}  // namespace changeforge
