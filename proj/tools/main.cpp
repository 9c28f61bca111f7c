#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "changeforge/detect.hpp"
#include "changeforge/evaluation.hpp"
#include "changeforge/genlasso.hpp"
#include "changeforge/image.hpp"
#include "changeforge/models.hpp"
#include "changeforge/parallel.hpp"
#include "changeforge/rng.hpp"

using json = nlohmann::ordered_json;
using namespace changeforge;

namespace {

// Bad flag values, unknown tokens and incompatible pairs: exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    // a:b:step expands to an inclusive range
    if (auto c1 = tok.find(':'); c1 != std::string::npos) {
      auto c2 = tok.find(':', c1 + 1);
      if (c2 == std::string::npos) throw UsageError("range must be lo:hi:step, got '" + tok + "'");
      double lo = std::stod(tok.substr(0, c1)), hi = std::stod(tok.substr(c1 + 1, c2 - c1 - 1));
      double step = std::stod(tok.substr(c2 + 1));
      if (!(step > 0.0) || hi < lo) throw UsageError("bad range '" + tok + "'");
      for (int k = 0; lo + k * step <= hi + 1e-9 * step; ++k) out.push_back(lo + k * step);
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + tok + "'");
    }
    if (used != tok.size()) throw UsageError("not a number: '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

ModelFamily family_arg(const std::string& s) {
  try {
    return parse_family(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

struct IrflFlags {
  double epsilon = 1e-8;
  double tol = 1e-6;
  int max_iter = 20;
  void attach(CLI::App* app) {
    app->add_option("--epsilon", epsilon, "IRFL weight offset")->capture_default_str();
    app->add_option("--tol", tol, "IRFL BIC convergence tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "IRFL iteration cap")->capture_default_str();
  }
  IrflConfig config() const {
    IrflConfig c;
    c.epsilon = epsilon;
    c.tol = tol;
    c.max_iterations = max_iter;
    try {
      validate(c);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

json irfl_json(const IrflConfig& c) {
  return json{{"epsilon", c.epsilon}, {"tol", c.tol}, {"max_iter", c.max_iterations}};
}

// ---- detect -------------------------------------------------------------

struct DetectArgs {
  std::string input, method = "irfl", family = "mean_shift", output, format = "json";
  std::optional<double> beta, threshold;
  double alpha = 0.05;
  int period = 12, intervals = 5000, max_cp = 5, m_max = 10;
  std::uint64_t seed = 1;
  IrflFlags irfl;
};

json method_json(const MethodOutput& out, const MethodParams& p, double ms) {
  json params{{"period", p.period}, {"seed", p.seed}, {"alpha", p.alpha}};
  if (p.beta) params["beta"] = *p.beta;
  if (p.threshold) params["threshold"] = *p.threshold;
  if (out.method == "fused" || out.method == "adafused" || out.method == "irfl") params["irfl"] = irfl_json(p.irfl);
  json coef = json::object();
  for (const auto& [k, v] : out.coefficients) coef[k] = v;
  return json{{"method", out.method},
              {"family", to_string(out.family)},
              {"params", params},
              {"changepoints", out.taus},
              {"coefficients", coef},
              {"bic", out.bic},
              {"m_hat", out.m_hat},
              {"runtime_ms", ms}};
}

void run_detect(const DetectArgs& a) {
  auto family = family_arg(a.family);
  if (std::find(method_names().begin(), method_names().end(), a.method) == method_names().end())
    throw UsageError("unknown method '" + a.method + "'");
  if (!method_supports(a.method, family))
    throw UsageError("method cannot estimate this family: " + a.method + " with " + a.family);
  MethodParams p;
  p.beta = a.beta;
  p.threshold = a.threshold;
  p.alpha = a.alpha;
  p.period = a.period;
  p.intervals = a.intervals;
  p.max_changepoints = a.max_cp;
  p.m_max = a.m_max;
  p.seed = a.seed;
  p.irfl = a.irfl.config();
  TimeSeries y = read_series_csv(a.input);
  auto t0 = Clock::now();
  MethodOutput out = run_method(a.method, family, y, p);
  double ms = elapsed_ms(t0);
  if (a.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "t,y,fitted,changepoint\n";
    for (int t = 1; t <= y.n(); ++t) {
      bool cp = std::find(out.taus.begin(), out.taus.end(), t) != out.taus.end();
      os << t << ',' << y(t) << ',' << out.fitted[t - 1] << ',' << (cp ? 1 : 0) << '\n';
    }
    emit(a.output, os.str());
  } else {
    emit(a.output, method_json(out, p, ms).dump(2) + "\n");
  }
}

// ---- path ---------------------------------------------------------------

struct PathArgs {
  std::string input, family = "mean_shift", output, format = "tsv";
  std::vector<double> lambdas;
  std::string lambda_grid;
  int period = 12;
  double zero_tol = 1e-8;
};

void run_path(const PathArgs& a) {
  auto family = family_arg(a.family);
  TimeSeries y = read_series_csv(a.input);
  ModelParams mp;
  mp.period = a.period;
  if (family == ModelFamily::ar1_mean_shift) mp.y = y.values();
  ModelSpec spec = build_model(family, y.n(), mp);
  AbsorbedDesign design = absorb_design(spec.X, spec.D);
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.values().data(), y.n());
  SolutionPath path = solve_dual_path(yv, design.D);

  std::vector<double> lambdas = a.lambdas;
  if (!a.lambda_grid.empty()) {
    auto g = parse_grid(a.lambda_grid);
    lambdas.insert(lambdas.end(), g.begin(), g.end());
  }
  if (!lambdas.empty()) {
    // Coefficients on the original design scale at each requested lambda.
    json out = json::array();
    for (double lam : lambdas) {
      if (!(lam >= 0.0)) throw UsageError("lambda must be nonnegative");
      Eigen::VectorXd theta = coefficients_at_lambda(path, lam);
      Eigen::VectorXd beta = design.X_inv * theta;
      Eigen::VectorXd contrast = design.D * theta;
      auto rows = nonzero_rows(contrast, 1e-7, yv.cwiseAbs().maxCoeff());
      out.push_back(json{{"lambda", lam},
                         {"changepoints", spec.taus(rows)},
                         {"beta", std::vector<double>(beta.data(), beta.data() + beta.size())},
                         {"fitted", std::vector<double>(theta.data(), theta.data() + theta.size())}});
    }
    emit(a.output, out.dump(2) + "\n");
    return;
  }
  if (a.format == "json") {
    json nodes = json::array();
    auto node = [&](const PathNode& nd) {
      return json{{"lambda", nd.lambda}, {"event", to_string(nd.event)}, {"index", nd.index}, {"boundary", nd.boundary}};
    };
    for (const auto& nd : path.nodes) nodes.push_back(node(nd));
    nodes.push_back(node(path.terminal));
    emit(a.output, json{{"family", a.family}, {"n", y.n()}, {"nodes", nodes}}.dump(2) + "\n");
  } else {
    std::ostringstream os;
    write_path(os, path, a.zero_tol);
    emit(a.output, os.str());
  }
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  int scenario = 1, n = 0;
  double sigma = 1.0;
  bool randomized = false;
  std::uint64_t seed = 1;
  std::string output;
};

ScenarioSpec scenario_spec(int id, int n, double sigma, bool randomized, std::uint64_t seed) {
  if (id < 1 || id > 14) throw UsageError("scenario must be in 1..14");
  ScenarioSpec s;
  s.id = id;
  s.n = n;
  s.sigma = sigma;
  s.randomized = randomized;
  s.seed = seed;
  return s;
}

void run_simulate(const SimulateArgs& a) {
  auto data = simulate_scenario(scenario_spec(a.scenario, a.n, a.sigma, a.randomized, a.seed));
  json truth{{"scenario", data.id},
             {"n", data.y.n()},
             {"seed", a.seed},
             {"family", to_string(data.family)},
             {"changepoints", data.taus}};
  json globals = json::object();
  for (const auto& [k, v] : data.globals) globals[k] = v;
  truth["globals"] = globals;
  if (a.output.empty() || a.output == "-") {
    std::ostringstream os;
    os.precision(17);
    for (double v : data.y.values()) os << v << '\n';
    std::cout << os.str();
    std::cerr << truth.dump() << '\n';
    return;
  }
  write_series_csv(a.output, data.y.values());
  emit(a.output + ".truth.json", truth.dump(2) + "\n");
}

// ---- evaluate -----------------------------------------------------------

struct EvaluateArgs {
  std::string scenarios = "1", methods = "irfl", output;
  int reps = 10, n = 0;
  std::uint64_t seed = 1;
  IrflFlags irfl;
};

void run_evaluate(const EvaluateArgs& a) {
  std::vector<int> ids;
  for (const auto& s : split_list(a.scenarios)) {
    try {
      ids.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw UsageError("bad scenario '" + s + "'");
    }
  }
  auto methods = split_list(a.methods);
  if (ids.empty() || methods.empty()) throw UsageError("need at least one scenario and one method");
  if (a.reps < 1) throw UsageError("--reps must be positive");
  for (int id : ids) {
    if (id < 1 || id > 14) throw UsageError("scenario must be in 1..14");
    for (const auto& m : methods)
      if (!method_supports(m, scenario_family(id)))
        throw UsageError("method cannot estimate this family: " + m + " with " + to_string(scenario_family(id)));
  }
  MethodParams p;
  p.irfl = a.irfl.config();

  struct Job {
    int id;
    int rep;
  };
  std::vector<Job> jobs;
  for (int id : ids)
    for (int r = 0; r < a.reps; ++r) jobs.push_back({id, r});
  std::vector<EvaluationRow> rows;
  std::mutex mu;
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    std::uint64_t seed = SplitMix64::stream(a.seed, static_cast<std::uint64_t>(job.rep)).next();
    auto data = simulate_scenario(scenario_spec(job.id, a.n, 1.0, false, seed));
    std::vector<EvaluationRow> local;
    for (const auto& m : methods) {
      MethodParams mp = p;
      mp.seed = seed;
      if (data.family == ModelFamily::seasonal || data.family == ModelFamily::seasonal_trend) mp.period = 12;
      auto t0 = Clock::now();
      MethodOutput out = run_method(m, data.family, data.y, mp);
      EvaluationRow row;
      row.scenario = job.id;
      row.method = m;
      row.seed = static_cast<std::uint64_t>(job.rep + 1);
      row.m_hat = out.m_hat;
      row.distance = tau_distance(out.taus, data.taus, data.y.n()).distance;
      row.bic = out.bic;
      row.runtime_ms = elapsed_ms(t0);
      local.push_back(row);
    }
    std::lock_guard<std::mutex> lock(mu);
    rows.insert(rows.end(), local.begin(), local.end());
  });
  std::ostringstream os;
  write_report(os, rows);
  emit(a.output, os.str());
}

// ---- denoise ------------------------------------------------------------

struct DenoiseArgs {
  std::string input, output = "denoised", lambda_grid = "0.1";
  double edge_tol = 1e-3, rho = 1.0;
  int admm_iter = 2000;
  IrflFlags irfl{1e-3, 1e-6, 4};
};

void run_denoise(const DenoiseArgs& a) {
  GridImage img = read_pgm(a.input);
  auto lambdas = parse_grid(a.lambda_grid);
  for (double l : lambdas)
    if (!(l >= 0.0)) throw UsageError("lambda must be nonnegative");
  AdmmConfig admm;
  admm.rho = a.rho;
  admm.max_iter = a.admm_iter;
  IrflConfig cfg = a.irfl.config();
  auto stacks = irfl_2d(img, lambdas, cfg, admm);
  json summary = json::array();
  for (std::size_t k = 0; k < stacks.size(); ++k) {
    json iters = json::array();
    for (std::size_t i = 0; i < stacks[k].iterates.size(); ++i) {
      std::string name = a.output + "_l" + std::to_string(k + 1) + "_i" + std::to_string(i + 1) + ".pgm";
      GridImage out = devectorize_column_major(stacks[k].iterates[i], img.rows(), img.cols());
      write_pgm(name, out);
      const auto& s = stacks[k].solves[i];
      iters.push_back(json{{"file", name},
                           {"admm_iterations", s.iterations},
                           {"converged", s.converged},
                           {"primal_residual", s.primal_residual},
                           {"dual_residual", s.dual_residual}});
    }
    // Overlay of the last iterate's edges.
    const auto& last = stacks[k].iterates.back();
    EdgeSet edges = edge_set(last, img.rows(), img.cols(), a.edge_tol);
    std::string overlay = a.output + "_l" + std::to_string(k + 1) + "_edges.ppm";
    write_edge_overlay(overlay, devectorize_column_major(last, img.rows(), img.cols()), edges);
    summary.push_back(json{{"lambda", stacks[k].lambda},
                           {"iterates", iters},
                           {"edges", edges.rows.size()},
                           {"overlay", overlay}});
  }
  std::cout << json{{"rows", img.rows()}, {"cols", img.cols()}, {"irfl", irfl_json(cfg)}, {"stacks", summary}}.dump(2)
            << '\n';
}

// ---- maunaloa -----------------------------------------------------------

struct MaunaLoaArgs {
  std::string input, output, phi_grid;
  int period = 12, n = 0, radius = 12;
  IrflFlags irfl;
};

void run_maunaloa(const MaunaLoaArgs& a) {
  if (a.n < 0) throw UsageError("--n must be nonnegative");
  MonthlySeries ms = read_noaa_monthly(a.input);
  int n = static_cast<int>(ms.value.size());
  if (a.n > 0) {
    if (a.n > n) throw UsageError("--n exceeds the number of monthly rows");
    n = a.n;
  }
  std::vector<double> grid = a.phi_grid.empty() ? default_phi_grid() : parse_grid(a.phi_grid);
  for (double phi : grid)
    if (!(phi > -1.0 && phi < 1.0)) throw UsageError("phi grid values must lie in (-1, 1)");
  ModelParams mp;
  mp.period = a.period;
  ModelSpec spec = build_model(ModelFamily::quad_seasonal, n, mp);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ms.value.data(), n);

  auto t0 = Clock::now();
  PhiSearchResult res = phi_grid_search(spec, y, grid, a.irfl.config(), a.radius);
  ConstrainedFit fit = refit_changepoints(spec, y, res.rows, res.phi);
  double ms_total = elapsed_ms(t0);

  // beta1, beta2 lead global_columns for this family.
  double b1 = fit.beta(0), b2 = fit.beta(1);
  const Eigen::MatrixXd& V = fit.global_cov;
  auto rate_json = [&](double t) {
    RateEstimate r = gls_rate_inference(b1, b2, V(0, 0), V(1, 1), V(0, 1), t);
    return json{{"t", t}, {"rate", r.rate}, {"se", r.se}, {"ci95", {r.lo, r.hi}}};
  };
  // Large-sample AR(1) interval, 1.96 sqrt((1 - phi^2) / n).
  double phi_half = 1.96 * std::sqrt(std::max(0.0, 1.0 - res.phi * res.phi) / n);
  json cps = json::array();
  for (int tau : res.taus) {
    char ym[16];
    std::snprintf(ym, sizeof ym, "%04d-%02d", ms.year[tau - 1], ms.month[tau - 1]);
    cps.push_back(json{{"index", tau}, {"month", ym}});
  }
  json coef = json::object();
  for (int c : spec.global_columns) coef[spec.labels[c]] = fit.beta(c);
  json grid_json = json::array();
  for (const auto& g : res.grid) grid_json.push_back(json{{"phi", g.phi}, {"bic", g.bic}, {"m_hat", g.m_hat}});
  json out{{"method", "irfl"},
           {"family", "quad_seasonal"},
           {"params", json{{"period", a.period}, {"n", n}, {"radius", a.radius}, {"irfl", irfl_json(a.irfl.config())}}},
           {"changepoints", cps},
           {"coefficients", coef},
           {"phi", res.phi},
           {"phi_ci95", {res.phi - phi_half, res.phi + phi_half}},
           {"bic", res.bic},
           {"m_hat", res.taus.size()},
           {"rates", json::array({rate_json(0.0), rate_json(static_cast<double>(n))})},
           {"phi_grid", grid_json},
           {"runtime_ms", ms_total}};
  emit(a.output, out.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"changeforge: changepoint detection with reweighted fused lasso paths"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  DetectArgs det;
  auto* c_det = app.add_subcommand("detect", "Detect changepoints in a CSV series");
  c_det->add_option("input", det.input, "Series CSV")->required()->check(CLI::ExistingFile);
  c_det->add_option("--method", det.method, "Method token")->capture_default_str();
  c_det->add_option("--family", det.family, "Model family")->capture_default_str();
  c_det->add_option("--beta", det.beta, "Penalty per changepoint (op, pelt, cpop)");
  c_det->add_option("--threshold", det.threshold, "Contrast threshold (bs, wbs, not)");
  c_det->add_option("--alpha", det.alpha, "Test level (cusum, fmax)")->capture_default_str();
  c_det->add_option("--period", det.period, "Seasonal period")->capture_default_str()->check(CLI::PositiveNumber);
  c_det->add_option("--intervals", det.intervals, "Random intervals (wbs, not, wcm)")->capture_default_str();
  c_det->add_option("--max-cp", det.max_cp, "Maximum changepoints (wcm)")->capture_default_str();
  c_det->add_option("--m-max", det.m_max, "Largest model size (sn, ar1seg)")->capture_default_str();
  c_det->add_option("--seed", det.seed, "Seed")->capture_default_str();
  c_det->add_option("-o,--output", det.output, "Output file (stdout when absent)");
  c_det->add_option("--format", det.format, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  det.irfl.attach(c_det);

  PathArgs pa;
  auto* c_path = app.add_subcommand("path", "Dump the generalized lasso solution path");
  c_path->add_option("input", pa.input, "Series CSV")->required()->check(CLI::ExistingFile);
  c_path->add_option("--family", pa.family, "Model family")->capture_default_str();
  c_path->add_option("--lambda", pa.lambdas, "Report coefficients at these lambdas");
  c_path->add_option("--lambda-grid", pa.lambda_grid, "Comma list or lo:hi:step");
  c_path->add_option("--period", pa.period, "Seasonal period")->capture_default_str()->check(CLI::PositiveNumber);
  c_path->add_option("--zero-tol", pa.zero_tol, "Tolerance for counting active contrasts")->capture_default_str();
  c_path->add_option("-o,--output", pa.output, "Output file");
  c_path->add_option("--format", pa.format, "tsv or json")->capture_default_str()->check(CLI::IsMember({"tsv", "json"}));

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a scenario series; truth goes to <output>.truth.json");
  c_sim->add_option("--scenario", sim.scenario, "Scenario id 1..14")->capture_default_str();
  c_sim->add_option("--n", sim.n, "Length (0: scenario default)")->capture_default_str()->check(CLI::NonNegativeNumber);
  c_sim->add_option("--sigma", sim.sigma, "Noise scale")->capture_default_str()->check(CLI::NonNegativeNumber);
  c_sim->add_flag("--randomized", sim.randomized, "Random changepoints (scenarios 7 and 10)");
  c_sim->add_option("--seed", sim.seed, "Seed")->capture_default_str();
  c_sim->add_option("-o,--output", sim.output, "Series CSV");

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Methods x scenarios x seeded replicates report");
  c_ev->add_option("--scenario", ev.scenarios, "Scenario ids, comma separated")->capture_default_str();
  c_ev->add_option("--methods,--method", ev.methods, "Methods, comma separated")->capture_default_str();
  c_ev->add_option("--reps", ev.reps, "Replicates per scenario")->capture_default_str();
  c_ev->add_option("--n", ev.n, "Length (0: scenario default)")->capture_default_str()->check(CLI::NonNegativeNumber);
  c_ev->add_option("--seed", ev.seed, "Base seed")->capture_default_str();
  c_ev->add_option("-o,--output", ev.output, "Report CSV");
  ev.irfl.attach(c_ev);

  DenoiseArgs dn;
  auto* c_dn = app.add_subcommand("denoise", "Reweighted TV denoising of a PGM image");
  c_dn->add_option("input", dn.input, "Binary PGM")->required()->check(CLI::ExistingFile);
  c_dn->add_option("--lambda-grid", dn.lambda_grid, "Comma list or lo:hi:step")->capture_default_str();
  c_dn->add_option("--rho", dn.rho, "ADMM step")->capture_default_str()->check(CLI::PositiveNumber);
  c_dn->add_option("--admm-iter", dn.admm_iter, "ADMM iteration cap")->capture_default_str();
  c_dn->add_option("--edge-tol", dn.edge_tol, "Edge threshold on |D mu|")->capture_default_str();
  c_dn->add_option("-o,--output", dn.output, "Output prefix")->capture_default_str();
  dn.irfl.attach(c_dn);

  MaunaLoaArgs ml;
  auto* c_ml = app.add_subcommand("maunaloa", "Quadratic-trend seasonal fit with AR(1) prewhitening");
  c_ml->add_option("input", ml.input, "NOAA monthly CSV")->required()->check(CLI::ExistingFile);
  c_ml->add_option("--phi-grid", ml.phi_grid, "Comma list or lo:hi:step (default 0:0.95:0.05)");
  c_ml->add_option("--period", ml.period, "Seasonal period")->capture_default_str()->check(CLI::PositiveNumber);
  c_ml->add_option("--n", ml.n, "Use the first n months (0: all)")->capture_default_str();
  c_ml->add_option("--radius", ml.radius, "Refinement radius")->capture_default_str();
  c_ml->add_option("-o,--output", ml.output, "Output JSON");
  ml.irfl.attach(c_ml);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_det->parsed()) run_detect(det);
    if (c_path->parsed()) run_path(pa);
    if (c_sim->parsed()) run_simulate(sim);
    if (c_ev->parsed()) run_evaluate(ev);
    if (c_dn->parsed()) run_denoise(dn);
    if (c_ml->parsed()) run_maunaloa(ml);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IncompatibleMethod& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
