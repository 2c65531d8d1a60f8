#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "locest/distribution.hpp"
#include "locest/estimators.hpp"

namespace locest {

enum class EstimatorKind { SmoothedMle, UnsmoothedMle, Mean, Median, MedianOfMeans, GlobalMle };

EstimatorKind estimator_kind_from_string(const std::string& s);
std::string to_string(EstimatorKind k);

struct ExperimentConfig {
  Distribution dist = Distribution::gaussian();
  double lambda_true = 0.0;
  std::vector<std::size_t> n_grid;
  std::vector<double> r_grid;  // log-spaced radii
  double delta = 0.05;
  std::size_t trials = 400;
  std::vector<EstimatorKind> estimators;
  uint64_t seed = 0;
  std::string out_path;
  unsigned workers = 0;  // 0 = hardware default; results never depend on it
};

struct CellResult {
  std::size_t n = 0;
  double r = 0.0;
  double mse = 0.0;
  double mean_abs_err = 0.0;
  std::map<double, double> quantile_err;  // probability -> |error| quantile
  std::size_t trials = 0;
  std::size_t failures = 0;  // flagged root-finding fallbacks
};

/// Mean-squared-error sweep of the full-line smoothed MLE over (n, r).
/// The estimator maximizes the smoothed log-likelihood of the perturbed
/// samples over the whole real line. Per-trial seeds derive from
/// (seed, n, r, trial); estimator errors are recorded, never aborted on.
std::vector<CellResult> run_mse_heatmap(const ExperimentConfig& cfg);

struct ErrorDistribution {
  std::vector<EstimatorKind> estimators;
  // errors[e][t] = lambda_hat - lambda for estimator e on trial t; all
  // estimators consume identical draws within a trial.
  std::vector<std::vector<double>> errors;
  std::vector<std::size_t> failures;
};

ErrorDistribution run_error_distribution(const ExperimentConfig& cfg);

struct CoverageRow {
  double factor = 0.0;
  double coverage = 0.0;
  std::size_t trials = 0;
};

/// Fraction of trials with |lambda_hat - lambda| <= factor * predicted
/// bound for factor in {1.0, 1.1, 1.2, 1.5}, using the two-stage estimator.
std::vector<CoverageRow> run_coverage(const ExperimentConfig& cfg);

/// CSV renderings; floating-point fields carry 17 significant digits and
/// the bytes are identical across runs and worker counts for a fixed seed.
std::string heatmap_csv(const std::vector<CellResult>& cells);
std::string errors_csv(const ErrorDistribution& ed);
std::string coverage_csv(const std::vector<CoverageRow>& rows);

/// Log-spaced grid helper for radius sweeps.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

}  // namespace locest
