#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "locest/dist_json.hpp"
#include "locest/errors.hpp"
#include "locest/estimators.hpp"
#include "locest/experiments.hpp"
#include "locest/invariants.hpp"
#include "locest/lower_bound.hpp"
#include "locest/math_util.hpp"
#include "locest/smoothing.hpp"

namespace {

using namespace locest;

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open samples file: " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    try {
      out.push_back(std::stod(line.substr(first)));
    } catch (const std::exception&) {
      throw InvalidArgument("bad sample line: " + line);
    }
  }
  if (out.empty()) throw InvalidArgument("samples file is empty: " + path);
  return out;
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open output file: " + out_path);
  out << content;
}

std::vector<std::size_t> parse_n_grid(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
  if (out.empty()) throw InvalidArgument("empty n grid");
  return out;
}

std::vector<double> parse_r_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw InvalidArgument("empty r grid");
  return out;
}

struct CommonArgs {
  std::string dist_path;
  std::string samples_path;
  std::string out_path;
  double r = 0.0;
  double delta = 0.05;
  double gamma = 1.0;
  double eps_max = 0.0;
  double shift = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  uint64_t seed = 0;
  unsigned workers = 0;
};

int cmd_estimate(const CommonArgs& a, std::optional<double> r_override) {
  const Distribution dist = distribution_from_json_file(a.dist_path);
  const std::vector<double> samples = read_samples(a.samples_path);
  EstimatorConfig cfg;
  cfg.delta = a.delta;
  cfg.gamma = std::max(a.gamma, 1.0);
  cfg.r_override = r_override;
  RngStream rng = RngStream::derive(a.seed, "estimate");
  const EstimateResult res = global_mle(dist, samples, a.delta, rng, cfg);
  std::ostringstream os;
  os << "seed=" << a.seed << '\n';
  os << "n=" << samples.size() << '\n';
  os << "lambda_hat=" << fmt17(res.lambda_hat) << '\n';
  os << "interval_lo=" << fmt17(res.interval_lo) << '\n';
  os << "interval_hi=" << fmt17(res.interval_hi) << '\n';
  os << "r_used=" << fmt17(res.r_used) << '\n';
  os << "fisher_r=" << fmt17(res.fisher_r) << '\n';
  os << "predicted_bound=" << fmt17(res.predicted_bound) << '\n';
  os << "refinement_factor=" << fmt17(res.refinement_factor) << '\n';
  os << "warnings=";
  for (std::size_t i = 0; i < res.warnings.size(); ++i)
    os << (i ? ";" : "") << res.warnings[i];
  os << '\n';
  write_output(a.out_path, os.str());
  return kExitOk;
}

int cmd_fisher(const CommonArgs& a) {
  const Distribution dist = distribution_from_json_file(a.dist_path);
  auto m = smooth_cached(dist, a.r);
  std::ostringstream os;
  os << "I_r=" << fmt17(m->fisher_info()) << '\n';
  os << "bound=" << fmt17(1.0 / (a.r * a.r)) << '\n';
  write_output(a.out_path, os.str());
  return kExitOk;
}

int cmd_score_scan(const CommonArgs& a, double lo, double hi, std::size_t points) {
  const Distribution dist = distribution_from_json_file(a.dist_path);
  auto m = smooth_cached(dist, a.r);
  if (lo == 0.0 && hi == 0.0) {
    lo = dist.quantile(0.005) - a.r;
    hi = dist.quantile(0.995) + a.r;
  }
  if (!(hi > lo)) throw InvalidArgument("score-scan: need hi > lo");
  if (points < 2) throw InvalidArgument("score-scan: need at least 2 points");
  std::ostringstream os;
  os << "x,s_r,s_r_prime\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double x =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    os << fmt17(x) << ',' << fmt17(m->score(x)) << ',' << fmt17(m->score_deriv(x)) << '\n';
  }
  write_output(a.out_path, os.str());
  return kExitOk;
}

int cmd_heatmap(const CommonArgs& a, const std::string& n_grid, const std::string& r_grid,
                double lambda_true) {
  ExperimentConfig cfg;
  cfg.dist = distribution_from_json_file(a.dist_path);
  cfg.lambda_true = lambda_true;
  cfg.n_grid = parse_n_grid(n_grid);
  cfg.r_grid = r_grid.empty() ? log_spaced(0.001, 1.0, 8) : parse_r_grid(r_grid);
  cfg.delta = a.delta;
  cfg.trials = a.trials == 0 ? 400 : a.trials;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  write_output(a.out_path, heatmap_csv(run_mse_heatmap(cfg)));
  return kExitOk;
}

int cmd_errors(const CommonArgs& a, const std::string& estimators, double lambda_true) {
  ExperimentConfig cfg;
  cfg.dist = distribution_from_json_file(a.dist_path);
  cfg.lambda_true = lambda_true;
  cfg.n_grid = {a.n == 0 ? 500 : a.n};
  cfg.r_grid = {a.r == 0.0 ? 0.05 : a.r};
  cfg.delta = a.delta;
  cfg.trials = a.trials == 0 ? 2000 : a.trials;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  std::stringstream ss(estimators);
  std::string tok;
  while (std::getline(ss, tok, ',')) cfg.estimators.push_back(estimator_kind_from_string(tok));
  write_output(a.out_path, errors_csv(run_error_distribution(cfg)));
  return kExitOk;
}

int cmd_coverage(const CommonArgs& a, double lambda_true) {
  ExperimentConfig cfg;
  cfg.dist = distribution_from_json_file(a.dist_path);
  cfg.lambda_true = lambda_true;
  cfg.n_grid = {a.n == 0 ? 1000 : a.n};
  cfg.delta = a.delta;
  cfg.trials = a.trials == 0 ? 2000 : a.trials;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  write_output(a.out_path, coverage_csv(run_coverage(cfg)));
  return kExitOk;
}

int cmd_lowerbound(const CommonArgs& a, double kappa, int kmax, double floor_c) {
  const Distribution dist = distribution_from_json_file(a.dist_path);
  auto m = smooth_cached(dist, a.r);
  const double eps = 0.5 * a.shift;
  NewLbOptions opts;
  opts.n = a.n;
  opts.floor_c = floor_c;
  LowerBoundReport rep = check_newlb_conditions(*m, eps, kappa, kmax, opts);
  if (a.trials > 0 && a.n > 0) {
    RngStream rng = RngStream::derive(a.seed, "lowerbound");
    const TvEstimate tv = tv_product_mc(*m, a.shift, a.n, a.trials, rng);
    rep.tv_complement_estimate = tv.complement;
    rep.tv_complement_stderr = tv.std_err;
  }
  nlohmann::json j;
  j["seed"] = a.seed;
  j["shift"] = rep.shift;
  j["kl_pq"] = rep.kl_pq;
  j["kl_qp"] = rep.kl_qp;
  j["hellinger_sq"] = rep.hellinger_sq;
  j["kappa"] = rep.kappa;
  nlohmann::json gp, gq;
  for (const auto& [k, v] : rep.gamma_moments_p) gp[std::to_string(k)] = v;
  for (const auto& [k, v] : rep.gamma_moments_q) gq[std::to_string(k)] = v;
  j["gamma_moments_p"] = gp;
  j["gamma_moments_q"] = gq;
  nlohmann::json conds = nlohmann::json::array();
  for (int i = 0; i < 6; ++i)
    conds.push_back({{"condition", i + 1}, {"pass", rep.conditions[i]}, {"ratio", rep.ratios[i]}});
  j["conditions"] = conds;
  if (rep.n > 0) {
    j["n"] = rep.n;
    j["delta_floor"] = rep.delta_floor;
  }
  if (rep.tv_complement_estimate >= 0.0) {
    j["tv_complement_estimate"] = rep.tv_complement_estimate;
    j["tv_complement_stderr"] = rep.tv_complement_stderr;
  }
  write_output(a.out_path, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_check_invariants(const CommonArgs& a, const std::string& filter) {
  const auto results = run_invariants(filter, a.workers);
  if (results.empty()) throw InvalidArgument("check-invariants: filter matched nothing");
  const int failures = report_invariants(results, std::cout);
  return failures == 0 ? kExitOk : kExitInvariantFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-sample location estimation with Gaussian-smoothed maximum likelihood"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string n_grid = "200,1000,5000";
  std::string r_grid;
  std::string estimators = "smoothed_mle,unsmoothed_mle,mean,median_of_means";
  std::string filter;
  double lambda_true = 0.0;
  double lo = 0.0, hi = 0.0;
  std::size_t points = 200;
  double kappa = 0.05;
  int kmax = 4;
  double floor_c = 1.0;
  double r_override = 0.0;
  bool has_r_override = false;

  auto add_common = [&](CLI::App* cmd, bool needs_dist) {
    auto* opt = cmd->add_option("--dist", a.dist_path, "distribution spec (JSON file)");
    if (needs_dist) opt->required();
    cmd->add_option("--seed", a.seed, "master seed (default 0)");
    cmd->add_option("--out", a.out_path, "output file (stdout when omitted)");
    cmd->add_option("--workers", a.workers, "worker threads (0 = hardware)");
  };

  auto* estimate = app.add_subcommand("estimate", "two-stage location estimate from samples");
  add_common(estimate, true);
  estimate->add_option("--samples", a.samples_path, "sample file, one float per line")->required();
  estimate->add_option("--delta", a.delta, "failure probability");
  estimate->add_option("--gamma", a.gamma, "slack parameter");
  estimate->add_option("--r", r_override, "override the smoothing radius")
      ->each([&](const std::string&) { has_r_override = true; });

  auto* fisher = app.add_subcommand("fisher", "smoothed Fisher information and its 1/r^2 cap");
  add_common(fisher, true);
  fisher->add_option("--r", a.r, "smoothing radius")->required();

  auto* scan = app.add_subcommand("score-scan", "CSV scan of the smoothed score and derivative");
  add_common(scan, true);
  scan->add_option("--r", a.r, "smoothing radius")->required();
  scan->add_option("--lo", lo, "scan start");
  scan->add_option("--hi", hi, "scan end");
  scan->add_option("--points", points, "number of scan points");

  auto* heatmap = app.add_subcommand("heatmap", "mean-squared-error sweep over (n, r)");
  add_common(heatmap, true);
  heatmap->add_option("--n-grid", n_grid, "comma-separated sample sizes");
  heatmap->add_option("--r-grid", r_grid, "comma-separated radii (default 8 log-spaced in [0.001,1])");
  heatmap->add_option("--trials", a.trials, "trials per cell (default 400)");
  heatmap->add_option("--delta", a.delta, "failure probability");
  heatmap->add_option("--lambda", lambda_true, "true location");

  auto* errors = app.add_subcommand("errors", "per-estimator error distributions");
  add_common(errors, true);
  errors->add_option("--n", a.n, "sample size (default 500)");
  errors->add_option("--r", a.r, "smoothing radius (default 0.05)");
  errors->add_option("--trials", a.trials, "trials (default 2000)");
  errors->add_option("--delta", a.delta, "failure probability");
  errors->add_option("--estimators", estimators, "comma-separated estimator kinds");
  errors->add_option("--lambda", lambda_true, "true location");

  auto* coverage = app.add_subcommand("coverage", "coverage of the predicted error bound");
  add_common(coverage, true);
  coverage->add_option("--n", a.n, "sample size (default 1000)");
  coverage->add_option("--trials", a.trials, "trials (default 2000)");
  coverage->add_option("--delta", a.delta, "failure probability");
  coverage->add_option("--lambda", lambda_true, "true location");

  auto* lower = app.add_subcommand("lowerbound", "divergence conditions and TV diagnostics (JSON)");
  add_common(lower, true);
  lower->add_option("--r", a.r, "smoothing radius")->required();
  lower->add_option("--shift", a.shift, "two-point shift (2 eps)")->required();
  lower->add_option("--kappa", kappa, "condition slack");
  lower->add_option("--kmax", kmax, "highest moment order");
  lower->add_option("--n", a.n, "sample count for the TV product and floor");
  lower->add_option("--trials", a.trials, "Monte Carlo trials for the TV estimate");
  lower->add_option("--floor-c", floor_c, "correction multiplier in the failure floor");

  auto* check = app.add_subcommand("check-invariants", "run the full property suite");
  add_common(check, false);
  check->add_option("--filter", filter, "run only checks whose name contains this substring");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (estimate->parsed())
      return cmd_estimate(a, has_r_override ? std::optional<double>(r_override) : std::nullopt);
    if (fisher->parsed()) return cmd_fisher(a);
    if (scan->parsed()) return cmd_score_scan(a, lo, hi, points);
    if (heatmap->parsed()) return cmd_heatmap(a, n_grid, r_grid, lambda_true);
    if (errors->parsed()) return cmd_errors(a, estimators, lambda_true);
    if (coverage->parsed()) return cmd_coverage(a, lambda_true);
    if (lower->parsed()) return cmd_lowerbound(a, kappa, kmax, floor_c);
    if (check->parsed()) return cmd_check_invariants(a, filter);
  } catch (const QuadratureFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NoFeasibleSmoothing& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
