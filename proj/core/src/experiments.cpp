#include "locest/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "locest/errors.hpp"
#include "locest/math_util.hpp"
#include "locest/parallel.hpp"

namespace locest {

namespace {

void validate(const ExperimentConfig& cfg, bool needs_r) {
  if (cfg.trials < 1) throw InvalidArgument("experiment: trials must be >= 1");
  if (cfg.n_grid.empty()) throw InvalidArgument("experiment: n grid must be nonempty");
  if (needs_r) {
    if (cfg.r_grid.empty()) throw InvalidArgument("experiment: r grid must be nonempty");
    for (double r : cfg.r_grid)
      if (!(r > 0.0)) throw InvalidArgument("experiment: radii must be > 0");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw InvalidArgument("experiment: delta must be in (0,1)");
}

double quantile_of_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  std::size_t idx = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(sorted.size())));
  idx = std::min(std::max<std::size_t>(idx, 1), sorted.size()) - 1;
  return sorted[idx];
}

// Full-line maximum-likelihood location for the smoothed model, given the
// already-perturbed samples.
double smoothed_argmax_mle(const SmoothedModel& m, std::span<const double> perturbed,
                           double iqr) {
  const auto [mn, mx] = std::minmax_element(perturbed.begin(), perturbed.end());
  const double r = m.radius();
  const double lo = *mn - 4.0 * (iqr + r);
  const double hi = *mx + 4.0 * (iqr + r);
  const double fine = std::min(r, iqr) / 16.0;
  return detail::argmax_loglik([&m](double x) { return m.log_pdf(x); }, perturbed, lo, hi,
                               iqr / 16.0, fine);
}

}  // namespace

EstimatorKind estimator_kind_from_string(const std::string& s) {
  if (s == "smoothed_mle") return EstimatorKind::SmoothedMle;
  if (s == "unsmoothed_mle") return EstimatorKind::UnsmoothedMle;
  if (s == "mean") return EstimatorKind::Mean;
  if (s == "median") return EstimatorKind::Median;
  if (s == "median_of_means") return EstimatorKind::MedianOfMeans;
  if (s == "global_mle") return EstimatorKind::GlobalMle;
  throw InvalidArgument("unknown estimator kind: " + s);
}

std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::SmoothedMle: return "smoothed_mle";
    case EstimatorKind::UnsmoothedMle: return "unsmoothed_mle";
    case EstimatorKind::Mean: return "mean";
    case EstimatorKind::Median: return "median";
    case EstimatorKind::MedianOfMeans: return "median_of_means";
    case EstimatorKind::GlobalMle: return "global_mle";
  }
  return "?";
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2)
    throw InvalidArgument("log_spaced: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                static_cast<double>(count - 1));
  return out;
}

std::vector<CellResult> run_mse_heatmap(const ExperimentConfig& cfg) {
  validate(cfg, true);
  const double iqr = cfg.dist.iqr();
  std::vector<CellResult> cells;
  cells.reserve(cfg.n_grid.size() * cfg.r_grid.size());

  for (std::size_t n : cfg.n_grid) {
    for (double r : cfg.r_grid) {
      auto model = smooth_cached(cfg.dist, r);
      std::vector<double> errs(cfg.trials);
      std::vector<uint8_t> failed(cfg.trials, 0);
      const uint64_t rbits = std::bit_cast<uint64_t>(r);
      parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        RngStream st = RngStream::derive(
            cfg.seed, "heatmap", hash_combine(hash_combine(n, rbits), t));
        std::vector<double> xs = cfg.dist.sample(n, st);
        for (double& x : xs) x += cfg.lambda_true;
        std::vector<double> perturbed = perturb_samples(xs, r, st);
        try {
          errs[t] = smoothed_argmax_mle(*model, perturbed, iqr) - cfg.lambda_true;
        } catch (const Error&) {
          errs[t] = 0.0;
          failed[t] = 1;
        }
      });

      CellResult cell;
      cell.n = n;
      cell.r = r;
      cell.trials = cfg.trials;
      std::vector<double> abs_errs;
      abs_errs.reserve(cfg.trials);
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        cell.failures += failed[t];
        cell.mse += errs[t] * errs[t];
        cell.mean_abs_err += std::fabs(errs[t]);
        abs_errs.push_back(std::fabs(errs[t]));
      }
      cell.mse /= static_cast<double>(cfg.trials);
      cell.mean_abs_err /= static_cast<double>(cfg.trials);
      std::sort(abs_errs.begin(), abs_errs.end());
      cell.quantile_err[0.90] = quantile_of_sorted(abs_errs, 0.90);
      cell.quantile_err[0.95] = quantile_of_sorted(abs_errs, 0.95);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

ErrorDistribution run_error_distribution(const ExperimentConfig& cfg) {
  validate(cfg, true);
  if (cfg.estimators.empty()) throw InvalidArgument("experiment: estimator list must be nonempty");
  const std::size_t n = cfg.n_grid.front();
  const double r = cfg.r_grid.front();
  const double iqr = cfg.dist.iqr();
  auto model = smooth_cached(cfg.dist, r);

  ErrorDistribution out;
  out.estimators = cfg.estimators;
  out.errors.assign(cfg.estimators.size(), std::vector<double>(cfg.trials, 0.0));
  out.failures.assign(cfg.estimators.size(), 0);
  std::vector<std::vector<uint8_t>> failed(cfg.estimators.size(),
                                           std::vector<uint8_t>(cfg.trials, 0));

  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    // One stream per trial; draws are consumed in a fixed order so every
    // estimator sees identical samples and, where used, identical noise.
    RngStream st = RngStream::derive(cfg.seed, "errors", t);
    std::vector<double> xs = cfg.dist.sample(n, st);
    for (double& x : xs) x += cfg.lambda_true;
    std::vector<double> perturbed = perturb_samples(xs, r, st);

    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      double est = 0.0;
      try {
        switch (cfg.estimators[e]) {
          case EstimatorKind::SmoothedMle:
            est = smoothed_argmax_mle(*model, perturbed, iqr);
            break;
          case EstimatorKind::UnsmoothedMle:
            est = baseline_estimate(BaselineKind::UnsmoothedMle, cfg.dist, xs, cfg.delta);
            break;
          case EstimatorKind::Mean:
            est = baseline_estimate(BaselineKind::Mean, cfg.dist, xs, cfg.delta);
            break;
          case EstimatorKind::Median:
            est = baseline_estimate(BaselineKind::Median, cfg.dist, xs, cfg.delta);
            break;
          case EstimatorKind::MedianOfMeans:
            est = baseline_estimate(BaselineKind::MedianOfMeans, cfg.dist, xs, cfg.delta);
            break;
          case EstimatorKind::GlobalMle: {
            RngStream gst = st.child("global_mle", t);
            EstimatorConfig ecfg;
            ecfg.delta = cfg.delta;
            EstimateResult res = global_mle(cfg.dist, xs, cfg.delta, gst, ecfg);
            est = res.lambda_hat;
            if (!res.warnings.empty()) failed[e][t] = 1;
            break;
          }
        }
      } catch (const Error&) {
        est = cfg.lambda_true;
        failed[e][t] = 1;
      }
      out.errors[e][t] = est - cfg.lambda_true;
    }
  });
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e)
    for (std::size_t t = 0; t < cfg.trials; ++t) out.failures[e] += failed[e][t];
  return out;
}

std::vector<CoverageRow> run_coverage(const ExperimentConfig& cfg) {
  validate(cfg, false);
  const std::size_t n = cfg.n_grid.front();
  static constexpr double kFactors[] = {1.0, 1.1, 1.2, 1.5};

  // Radius and model are data-independent; build once.
  EstimatorConfig ecfg;
  ecfg.delta = cfg.delta;
  (void)smooth_cached(cfg.dist, choose_rstar(cfg.dist, n, cfg.delta, ecfg));

  std::vector<double> ratio(cfg.trials, 0.0);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    RngStream st = RngStream::derive(cfg.seed, "coverage", t);
    std::vector<double> xs = cfg.dist.sample(n, st);
    for (double& x : xs) x += cfg.lambda_true;
    try {
      EstimateResult res = global_mle(cfg.dist, xs, cfg.delta, st, ecfg);
      ratio[t] = std::fabs(res.lambda_hat - cfg.lambda_true) / res.predicted_bound;
    } catch (const Error&) {
      ratio[t] = std::numeric_limits<double>::infinity();
    }
  });

  std::vector<CoverageRow> rows;
  for (double f : kFactors) {
    CoverageRow row;
    row.factor = f;
    row.trials = cfg.trials;
    std::size_t hit = 0;
    for (double q : ratio) hit += q <= f ? 1 : 0;
    row.coverage = static_cast<double>(hit) / static_cast<double>(cfg.trials);
    rows.push_back(row);
  }
  return rows;
}

std::string heatmap_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "n,r,mse,mean_abs_err,q90,q95,trials,failures\n";
  for (const auto& c : cells) {
    os << c.n << ',' << fmt17(c.r) << ',' << fmt17(c.mse) << ',' << fmt17(c.mean_abs_err) << ','
       << fmt17(c.quantile_err.at(0.90)) << ',' << fmt17(c.quantile_err.at(0.95)) << ','
       << c.trials << ',' << c.failures << '\n';
  }
  return os.str();
}

std::string errors_csv(const ErrorDistribution& ed) {
  std::ostringstream os;
  os << "estimator,trial,error\n";
  for (std::size_t e = 0; e < ed.estimators.size(); ++e)
    for (std::size_t t = 0; t < ed.errors[e].size(); ++t)
      os << to_string(ed.estimators[e]) << ',' << t << ',' << fmt17(ed.errors[e][t]) << '\n';
  return os.str();
}

std::string coverage_csv(const std::vector<CoverageRow>& rows) {
  std::ostringstream os;
  os << "factor,coverage,trials\n";
  for (const auto& r : rows)
    os << fmt17(r.factor) << ',' << fmt17(r.coverage) << ',' << r.trials << '\n';
  return os.str();
}

}  // namespace locest
