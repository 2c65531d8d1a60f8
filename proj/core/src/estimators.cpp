#include "locest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locest/errors.hpp"
#include "locest/math_util.hpp"

namespace locest {

std::vector<double> perturb_samples(std::span<const double> samples, double r, RngStream& rng) {
  if (!(r > 0.0)) throw InvalidRadius("perturb_samples: radius must be > 0");
  std::vector<double> out;
  out.reserve(samples.size());
  for (double x : samples) out.push_back(x + r * rng.normal());
  return out;
}

double empirical_score(const SmoothedModel& m, std::span<const double> perturbed,
                       double lambda_hat) {
  double acc = 0.0;
  for (double x : perturbed) acc += m.score(x - lambda_hat);
  return acc;
}

ErrorBound error_bound(std::size_t n, double delta, double fisher_r, const EstimatorConfig& cfg) {
  if (!(n >= 1) || !(delta > 0.0 && delta < 1.0) || !(fisher_r > 0.0))
    throw InvalidArgument("error_bound: n, delta, fisher_r must be positive");
  const double log_inv = std::log(1.0 / delta);
  ErrorBound out;
  out.leading = std::sqrt(2.0 * log_inv / (static_cast<double>(n) * fisher_r));
  out.refined_factor = std::sqrt(1.0 + cfg.eta / cfg.gamma) +
                       15.0 / (2.0 * std::sqrt(cfg.gamma)) *
                           std::pow(2.0 * log_inv / static_cast<double>(n), 0.25);
  return out;
}

EstimateResult local_mle(const SmoothedModel& m, std::span<const double> samples, double lo,
                         double hi, RngStream& rng, const EstimatorConfig& cfg) {
  if (!(lo < hi)) throw InvalidArgument("local_mle: interval must satisfy lo < hi");
  if (samples.empty()) throw InvalidArgument("local_mle: samples must be nonempty");
  const double r = m.radius();
  const std::vector<double> perturbed = perturb_samples(samples, r, rng);

  const std::size_t points =
      std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil((hi - lo) / (r / 8.0))));
  const double step = (hi - lo) / static_cast<double>(points - 1);

  EstimateResult res;
  res.interval_lo = lo;
  res.interval_hi = hi;
  res.r_used = r;

  double best_abs = std::numeric_limits<double>::infinity();
  double best_lambda = lo;
  double prev_val = 0.0;
  bool found = false;
  double a = lo, b = lo, fa = 0.0, fb = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double lam = lo + step * static_cast<double>(i);
    const double val = empirical_score(m, perturbed, lam);
    if (std::fabs(val) < best_abs) {
      best_abs = std::fabs(val);
      best_lambda = lam;
    }
    if (val == 0.0) {
      found = true;
      a = b = lam;
      fa = fb = 0.0;
      break;
    }
    if (i > 0 && std::signbit(val) != std::signbit(prev_val)) {
      found = true;
      a = lo + step * static_cast<double>(i - 1);
      b = lam;
      fa = prev_val;
      fb = val;
      break;
    }
    prev_val = val;
  }

  if (!found) {
    res.lambda_hat = best_lambda;
    res.warnings.push_back("no_root_in_interval");
  } else if (a == b) {
    res.lambda_hat = a;
  } else {
    while (b - a > cfg.root_tol) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double fm = empirical_score(m, perturbed, mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (std::signbit(fm) == std::signbit(fa)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
        fb = fm;
      }
    }
    res.lambda_hat = 0.5 * (a + b);
  }

  res.fisher_r = m.fisher_info();
  const ErrorBound eb = error_bound(samples.size(), cfg.delta, res.fisher_r, cfg);
  res.predicted_bound = eb.leading;
  res.refinement_factor = eb.refined_factor;
  return res;
}

EstimateResult local_mle(const Distribution& f, double r, std::span<const double> samples,
                         std::pair<double, double> interval, RngStream& rng,
                         const EstimatorConfig& cfg) {
  auto m = smooth_cached(f, r);
  return local_mle(*m, samples, interval.first, interval.second, rng, cfg);
}

QuantileInterval quantile_interval(const Distribution& f, std::span<const double> samples,
                                   double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidProbability("quantile_interval: delta must be in (0,1)");
  const std::size_t n = samples.size();
  if (n < 2) throw SampleSizeTooSmall("quantile_interval: need at least 2 samples");
  const double s = std::sqrt(2.0 * std::log(4.0 / delta) / static_cast<double>(n));
  if (!(s < 0.5))
    throw SampleSizeTooSmall("quantile_interval: need sqrt(2 log(4/delta)/n) < 1/2");

  double best_alpha = 0.0;
  double best_width = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int i = 1; i <= 999; ++i) {
    const double alpha = static_cast<double>(i) / 1000.0;
    if (alpha - s <= 1e-12 || alpha + s >= 1.0 - 1e-12) continue;
    const double width = f.quantile(alpha + s) - f.quantile(alpha - s);
    const bool better =
        !any || width < best_width - 1e-15 * std::fabs(best_width) ||
        (std::fabs(width - best_width) <= 1e-12 * std::max(1.0, std::fabs(best_width)) &&
         std::fabs(alpha - 0.5) < std::fabs(best_alpha - 0.5));
    if (better) {
      best_alpha = alpha;
      best_width = width;
      any = true;
    }
  }
  if (!any) throw SampleSizeTooSmall("quantile_interval: no feasible alpha on the grid");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t idx = static_cast<std::size_t>(
      std::ceil(best_alpha * static_cast<double>(n)));
  idx = std::min(std::max<std::size_t>(idx, 1), n) - 1;
  const double x_alpha = sorted[idx];

  QuantileInterval out;
  out.alpha = best_alpha;
  out.lo = x_alpha - f.quantile(best_alpha + s);
  out.hi = x_alpha - f.quantile(best_alpha - s);
  return out;
}

double choose_rstar(const Distribution& f, std::size_t n, double delta,
                    const EstimatorConfig& cfg) {
  if (!(n >= 1)) throw InvalidArgument("choose_rstar: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidProbability("choose_rstar: delta must be in (0,1)");
  const double log_inv = std::log(1.0 / delta);
  const double branch1 = cfg.rstar_c1 * std::pow(log_inv / static_cast<double>(n), 0.125);
  const double branch2 = cfg.rstar_c2 * std::exp2(-std::sqrt(std::log2(1.0 / delta)));
  return std::max(branch1, branch2) * f.iqr();
}

EstimateResult global_mle(const Distribution& f, std::span<const double> samples, double delta,
                          RngStream& rng, const EstimatorConfig& cfg) {
  const QuantileInterval qi = quantile_interval(f, samples, delta);
  const double r = cfg.r_override ? *cfg.r_override : choose_rstar(f, samples.size(), delta, cfg);

  EstimatorConfig local_cfg = cfg;
  local_cfg.delta = 0.5 * delta;  // even failure split across the two stages
  auto m = smooth_cached(f, r);
  EstimateResult res = local_mle(*m, samples, qi.lo, qi.hi, rng, local_cfg);

  const ErrorBound eb = error_bound(samples.size(), delta, res.fisher_r, cfg);
  res.predicted_bound = eb.leading;
  res.refinement_factor = eb.refined_factor;
  return res;
}

double solve_min_smoothing(const Distribution& f, double eps_max, double delta, std::size_t n,
                           double gamma) {
  if (!(gamma >= 1.0)) throw InvalidArgument("solve_min_smoothing: gamma must be >= 1");
  if (!(eps_max > 0.0)) throw InvalidArgument("solve_min_smoothing: eps_max must be > 0");
  if (!(delta > 0.0 && delta < std::exp(-1.0)))
    throw InvalidArgument("solve_min_smoothing: delta must be in (0, 1/e)");
  const double log_inv = std::log(1.0 / delta);
  const double loglog = std::log(log_inv);

  // Sample-budget condition does not involve r at all.
  if (!(log_inv / static_cast<double>(n) <= 1.0 / (gamma * gamma)))
    throw NoFeasibleSmoothing(
        "solve_min_smoothing: log(1/delta)/n exceeds 1/gamma^2 for every radius");

  const double r_lo = 2.0 * eps_max;
  const double r_hi = 10.0 * (f.iqr() + eps_max);
  std::string last_failed = "radius grid empty";
  for (double r = r_lo; r <= r_hi * (1.0 + 1e-12); r *= 1.05) {
    const double fisher = smooth_cached(f, r)->fisher_info();
    const double sqrt_fisher = std::sqrt(fisher);
    if (!(r * r * sqrt_fisher >= gamma * eps_max)) {
      last_failed = "r^2 sqrt(I_r) >= gamma * eps_max";
      continue;
    }
    if (!(std::log(1.0 / (r * sqrt_fisher)) <= log_inv / (gamma * loglog))) {
      last_failed = "log(1/(r sqrt(I_r))) <= log(1/delta)/(gamma log log(1/delta))";
      continue;
    }
    return r;
  }
  throw NoFeasibleSmoothing("solve_min_smoothing: no feasible radius; last failed condition: " +
                            last_failed);
}

namespace detail {

namespace {

double loglik_sum(const std::function<double(double)>& log_pdf, std::span<const double> samples,
                  double lambda) {
  double acc = 0.0;
  for (double x : samples) {
    const double v = log_pdf(x - lambda);
    if (std::isinf(v) && v < 0.0) return -std::numeric_limits<double>::infinity();
    acc += v;
  }
  return acc;
}

}  // namespace

double argmax_loglik(const std::function<double(double)>& log_pdf,
                     std::span<const double> samples, double lo, double hi, double coarse_h,
                     double fine_h) {
  constexpr double kMargin = 16.0;  // nats below the coarse max kept for refinement
  if (!(hi > lo)) return lo;
  fine_h = std::min(fine_h, coarse_h);

  const std::size_t nc =
      std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil((hi - lo) / coarse_h)) + 1);
  const double ch = (hi - lo) / static_cast<double>(nc - 1);
  std::vector<double> cl(nc);
  double cmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nc; ++i) {
    cl[i] = loglik_sum(log_pdf, samples, lo + ch * static_cast<double>(i));
    cmax = std::max(cmax, cl[i]);
  }

  double best_l = -std::numeric_limits<double>::infinity();
  double best_x = lo;
  auto consider = [&](double x) {
    const double v = loglik_sum(log_pdf, samples, x);
    if (v > best_l) {
      best_l = v;
      best_x = x;
    }
  };

  // Fine scan across every coarse cell that could still hide the optimum.
  std::size_t i = 0;
  while (i < nc) {
    if (cl[i] < cmax - kMargin) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < nc && cl[j + 1] >= cmax - kMargin) ++j;
    const double a = lo + ch * (i == 0 ? 0.0 : static_cast<double>(i - 1));
    const double b = lo + ch * static_cast<double>(std::min(j + 1, nc - 1));
    const std::size_t nf =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((b - a) / fine_h)) + 1);
    const double fh = (b - a) / static_cast<double>(nf - 1);
    for (std::size_t t = 0; t < nf; ++t) consider(a + fh * static_cast<double>(t));
    i = j + 1;
  }

  // Golden-section polish around the fine winner.
  double a = std::max(lo, best_x - fine_h);
  double b = std::min(hi, best_x + fine_h);
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = loglik_sum(log_pdf, samples, x1);
  double f2 = loglik_sum(log_pdf, samples, x2);
  for (int it = 0; it < 60 && b - a > 1e-13 * std::max(1.0, std::fabs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = loglik_sum(log_pdf, samples, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = loglik_sum(log_pdf, samples, x1);
    }
  }
  const double mid = 0.5 * (a + b);
  if (loglik_sum(log_pdf, samples, mid) >= best_l) return mid;
  return best_x;
}

}  // namespace detail

BaselineKind baseline_kind_from_string(const std::string& s) {
  if (s == "mean") return BaselineKind::Mean;
  if (s == "median") return BaselineKind::Median;
  if (s == "median_of_means") return BaselineKind::MedianOfMeans;
  if (s == "unsmoothed_mle") return BaselineKind::UnsmoothedMle;
  throw InvalidArgument("unknown baseline estimator: " + s);
}

double baseline_estimate(BaselineKind kind, const Distribution& f,
                         std::span<const double> samples, double delta) {
  if (samples.empty()) throw InvalidArgument("baseline_estimate: samples must be nonempty");
  const std::size_t n = samples.size();
  switch (kind) {
    case BaselineKind::Mean: {
      double acc = 0.0;
      for (double x : samples) acc += x;
      return acc / static_cast<double>(n);
    }
    case BaselineKind::Median: {
      std::vector<double> v(samples.begin(), samples.end());
      std::sort(v.begin(), v.end());
      return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
    case BaselineKind::MedianOfMeans: {
      if (!(delta > 0.0 && delta < 1.0))
        throw InvalidProbability("median_of_means: delta must be in (0,1)");
      std::size_t blocks =
          static_cast<std::size_t>(std::ceil(8.0 * std::log(1.0 / delta)));
      blocks = std::clamp<std::size_t>(blocks, 1, n);
      std::vector<double> means;
      means.reserve(blocks);
      std::size_t start = 0;
      for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t len = n / blocks + (b < n % blocks ? 1 : 0);
        double acc = 0.0;
        for (std::size_t i = 0; i < len; ++i) acc += samples[start + i];
        means.push_back(acc / static_cast<double>(len));
        start += len;
      }
      std::sort(means.begin(), means.end());
      const std::size_t m = means.size();
      return m % 2 == 1 ? means[m / 2] : 0.5 * (means[m / 2 - 1] + means[m / 2]);
    }
    case BaselineKind::UnsmoothedMle: {
      if (f.has_atoms())
        throw AtomDensityUndefined("unsmoothed_mle: base model contains a point mass");
      const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
      const double iqr = std::max(f.iqr(), 1e-12);
      const double lo = *mn - 4.0 * iqr;
      const double hi = *mx + 4.0 * iqr;
      const double fine = std::max(f.min_feature_scale() / 8.0, 1e-7 * iqr);
      return detail::argmax_loglik([&f](double x) { return f.log_pdf(x); }, samples, lo, hi,
                                   iqr / 16.0, fine);
    }
  }
  throw InvalidArgument("baseline_estimate: bad kind");
}

}  // namespace locest
