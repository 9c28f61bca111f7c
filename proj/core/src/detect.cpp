#include "changeforge/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "changeforge/amoc.hpp"
#include "changeforge/exact.hpp"
#include "changeforge/heuristic.hpp"

namespace changeforge {

namespace {

bool one_of(ModelFamily f, std::initializer_list<ModelFamily> fs) {
  return std::find(fs.begin(), fs.end(), f) != fs.end();
}

void add_segment_means(MethodOutput& out, const TimeSeries& y) {
  auto fit = piecewise_mean_fit(y, out.taus);
  for (std::size_t i = 0; i < fit.means.size(); ++i) out.coefficients.push_back({"mu" + std::to_string(i + 1), fit.means[i]});
  out.fitted.assign(y.n(), 0.0);
  for (int t = 1, seg = 0; t <= y.n(); ++t) {
    if (seg < static_cast<int>(out.taus.size()) && t == out.taus[seg]) ++seg;
    out.fitted[t - 1] = fit.means[seg];
  }
}

double default_penalty(const TimeSeries& y) {
  double s = mad_sigma(y.values());
  return 2.0 * s * s * std::log(static_cast<double>(y.n()));
}

MethodOutput run_irfl_method(const std::string& method, ModelFamily family, const TimeSeries& y,
                             const MethodParams& p) {
  MethodOutput out;
  ModelParams mp;
  mp.period = p.period;
  if (family == ModelFamily::ar1_mean_shift) mp.y = y.values();
  ModelSpec spec = build_model(family, y.n(), mp);
  IrflConfig cfg = p.irfl;
  if (method == "fused") cfg.max_iterations = 1;
  if (method == "adafused") cfg.max_iterations = 2;
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.values().data(), y.n());
  IrflRun run = run_irfl(yv, spec.X, spec.D, cfg);
  out.taus = spec.taus(run.change_rows);
  out.bic = run.bic;
  out.m_hat = static_cast<int>(out.taus.size());
  for (int c : spec.global_columns) out.coefficients.push_back({spec.labels[c], run.beta(c)});
  // One level per segment, read at the segment's first index.
  auto level_col = [&](int t) { return t <= spec.prefuse ? spec.mu_offset : spec.mu_offset + t - spec.prefuse; };
  std::vector<int> starts{1};
  starts.insert(starts.end(), out.taus.begin(), out.taus.end());
  for (std::size_t i = 0; i < starts.size(); ++i)
    out.coefficients.push_back({"mu" + std::to_string(i + 1), run.beta(level_col(starts[i]))});
  out.fitted.assign(run.fitted.data(), run.fitted.data() + run.fitted.size());
  return out;
}

}  // namespace

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"cusum", "bs", "wbs", "not", "wcm", "op", "pelt", "sn",
                                              "cpop", "ar1seg", "fmax", "fused", "adafused", "irfl"};
  return names;
}

bool method_supports(const std::string& m, ModelFamily f) {
  using F = ModelFamily;
  if (m == "fused" || m == "adafused" || m == "irfl") return true;
  if (m == "wcm" || m == "ar1seg") return one_of(f, {F::mean_shift, F::ar1_mean_shift});
  if (m == "cpop") return f == F::trend_shift;
  if (m == "fmax") return f == F::seasonal;
  if (m == "cusum" || m == "bs" || m == "wbs" || m == "not" || m == "op" || m == "pelt" || m == "sn")
    return f == F::mean_shift;
  throw std::invalid_argument("unknown method '" + m + "'");
}

double mean_shift_bic(const TimeSeries& y, const ChangepointVector& taus) {
  auto fit = piecewise_mean_fit(y, taus);
  int n = y.n();
  return n * std::log(std::max(fit.sse, 1e-300) / n) + static_cast<double>(taus.size()) * std::log(double(n));
}

MethodOutput run_method(const std::string& method, ModelFamily family, const TimeSeries& y, const MethodParams& p) {
  if (!method_supports(method, family))
    throw IncompatibleMethod("method cannot estimate this family: " + method + " with " + to_string(family));
  MethodOutput out;
  if (method == "fused" || method == "adafused" || method == "irfl") {
    out = run_irfl_method(method, family, y, p);
  } else if (method == "cpop") {
    CpopOptions opt;
    opt.beta = p.beta.value_or(2.0 * std::log(static_cast<double>(y.n())));
    auto r = cpop(y, opt);
    // A knot at k is the last point on the old line; the new slope's first increment lands at k + 1.
    for (int k : r.taus) out.taus.push_back(k + 1);
    out.fitted = r.fitted;
    double sse = 0.0;
    for (int t = 1; t <= y.n(); ++t) sse += (y(t) - r.fitted[t - 1]) * (y(t) - r.fitted[t - 1]);
    out.bic = y.n() * std::log(std::max(sse, 1e-300) / y.n()) + static_cast<double>(out.taus.size()) * std::log(double(y.n()));
    for (std::size_t i = 0; i < r.knots.size(); ++i)
      out.coefficients.push_back({"knot" + std::to_string(r.knots[i]), r.values[i]});
  } else if (method == "fmax") {
    auto r = fmax_seasonal(y, p.period, p.alpha);
    if (r.reject) out.taus = {r.location};
    out.bic = mean_shift_bic(y, out.taus);
    out.coefficients.push_back({"statistic", r.statistic});
  } else {
    DetectionConfig dc;
    dc.threshold = p.threshold;
    dc.intervals = p.intervals;
    dc.seed = p.seed;
    if (method == "cusum") {
      auto r = cusum_max_test(y, p.alpha);
      if (r.reject && r.location < y.n()) out.taus = {r.location + 1};
    } else if (method == "bs") {
      out.taus = binary_segmentation(y, dc).taus;
    } else if (method == "wbs") {
      out.taus = wild_binary_segmentation(y, dc).taus;
    } else if (method == "not") {
      out.taus = narrowest_over_threshold(y, dc).taus;
    } else if (method == "wcm") {
      dc.max_changepoints = p.max_changepoints;
      auto r = wcm(y, dc);
      out.taus = r.taus;
      out.coefficients.push_back({"phi", r.phi_hat});
    } else if (method == "op" || method == "pelt") {
      PartitionOptions opt;
      opt.beta = p.beta.value_or(default_penalty(y));
      auto r = method == "op" ? optimal_partition(y, CostFunction{}, opt) : pelt(y, CostFunction{}, opt);
      out.taus = r.taus;
    } else if (method == "sn") {
      // Segment neighbourhood, model size chosen by BIC.
      auto levels = pruned_segment_neighbourhood(y, std::min(p.m_max, y.n() - 1));
      double best = std::numeric_limits<double>::infinity();
      for (const auto& lv : levels) {
        double b = mean_shift_bic(y, lv.taus);
        if (b < best) {
          best = b;
          out.taus = lv.taus;
        }
      }
    } else if (method == "ar1seg") {
      auto r = ar1seg(y, p.m_max);
      out.taus = r.taus;
      out.coefficients.push_back({"phi", r.phi_tilde});
    }
    out.bic = mean_shift_bic(y, out.taus);
    add_segment_means(out, y);
  }
  if (out.fitted.empty()) add_segment_means(out, y);
  out.method = method;
  out.family = family;
  out.m_hat = static_cast<int>(out.taus.size());
  return out;
}

}  // namespace changeforge
