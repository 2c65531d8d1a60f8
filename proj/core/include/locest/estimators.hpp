#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locest/distribution.hpp"
#include "locest/rng.hpp"
#include "locest/smoothing.hpp"

namespace locest {

struct EstimatorConfig {
  double delta = 0.05;  // failure probability, in (0,1)
  double gamma = 1.0;   // slack parameter, >= 1
  double eps_max = 0.0; // initial half-width for feasibility solving
  std::optional<double> r_override;
  double rstar_c1 = 1.0;  // multipliers for the smoothing-radius rule
  double rstar_c2 = 1.0;
  double root_tol = 1e-9;
  double beta = 1.0;  // stand-ins for the analysis' hidden constants
  double eta = 1.0;
};

struct EstimateResult {
  double lambda_hat = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  double r_used = 0.0;
  double fisher_r = 0.0;
  double predicted_bound = 0.0;     // sqrt(2 log(1/delta) / (n I_r))
  double refinement_factor = 1.0;   // diagnostic 1 + rho
  std::vector<std::string> warnings;
};

/// Adds independent N(0, r^2) noise to every sample.
std::vector<double> perturb_samples(std::span<const double> samples, double r, RngStream& rng);

/// Sum of model scores at the perturbed samples re-centered at lambda_hat.
double empirical_score(const SmoothedModel& m, std::span<const double> perturbed,
                       double lambda_hat);

/// Root of the empirical score inside [lo, hi]: bracket scan over a uniform
/// grid of max(64, ceil((hi-lo)/(r/8))) points followed by bisection. When
/// no sign change exists the argmin of |score sum| is returned with a
/// "no_root_in_interval" warning instead of aborting.
EstimateResult local_mle(const SmoothedModel& m, std::span<const double> samples, double lo,
                         double hi, RngStream& rng, const EstimatorConfig& cfg);
EstimateResult local_mle(const Distribution& f, double r, std::span<const double> samples,
                         std::pair<double, double> interval, RngStream& rng,
                         const EstimatorConfig& cfg);

struct QuantileInterval {
  double lo = 0.0;
  double hi = 0.0;
  double alpha = 0.5;
};

/// Initial confidence interval from the sample alpha-quantile, with alpha
/// chosen on a 999-point grid to minimize the model quantile band of
/// half-width sqrt(2 log(4/delta) / n). Ties break toward alpha = 0.5.
QuantileInterval quantile_interval(const Distribution& f, std::span<const double> samples,
                                   double delta);

/// Smoothing radius rule r* = max(c1 (log(1/d)/n)^{1/8}, c2 2^{-sqrt(log2(1/d))}) * IQR.
double choose_rstar(const Distribution& f, std::size_t n, double delta,
                    const EstimatorConfig& cfg);

/// Two-stage estimator: quantile interval, radius rule, then local MLE with
/// the failure budget split evenly between the stages.
EstimateResult global_mle(const Distribution& f, std::span<const double> samples, double delta,
                          RngStream& rng, const EstimatorConfig& cfg);

/// Smallest radius on a geometric grid (ratio 1.05) satisfying the local
/// convergence conditions; throws NoFeasibleSmoothing listing the failed
/// condition otherwise.
double solve_min_smoothing(const Distribution& f, double eps_max, double delta, std::size_t n,
                           double gamma);

struct ErrorBound {
  double leading = 0.0;
  double refined_factor = 1.0;
};

ErrorBound error_bound(std::size_t n, double delta, double fisher_r, const EstimatorConfig& cfg);

enum class BaselineKind { Mean, Median, MedianOfMeans, UnsmoothedMle };

BaselineKind baseline_kind_from_string(const std::string& s);

double baseline_estimate(BaselineKind kind, const Distribution& f,
                         std::span<const double> samples, double delta);

namespace detail {

/// Deterministic hierarchical argmax of sum_i loglik(x_i - lambda) over
/// [lo, hi]: a coarse scan keeps the near-optimal sublevel regions, a fine
/// scan resolves them, and a golden-section polish finishes locally.
double argmax_loglik(const std::function<double(double)>& log_pdf,
                     std::span<const double> samples, double lo, double hi, double coarse_h,
                     double fine_h);

}  // namespace detail

}  // namespace locest
