#include "locest/invariants.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "locest/parallel.hpp"

#include "locest/distribution.hpp"
#include "locest/errors.hpp"
#include "locest/estimators.hpp"
#include "locest/experiments.hpp"
#include "locest/fixtures.hpp"
#include "locest/lower_bound.hpp"
#include "locest/math_util.hpp"
#include "locest/smoothing.hpp"

namespace locest {

namespace {

constexpr uint64_t kSuiteSeed = 0x10ca1e57;
const double kRadii[] = {0.01, 0.05, 0.1, 0.5, 1.0};

struct Check {
  std::string name;
  std::function<CheckResult(unsigned)> fn;
};

using Fixtures = std::vector<std::pair<std::string, Distribution>>;

const Fixtures& fixtures() {
  static const Fixtures fx = standard_fixtures();
  return fx;
}

bool is_continuous(const Distribution& d) { return !d.has_atoms(); }

CheckResult worst_of(const std::string& name, double measured, double bound, bool le,
                     const std::string& detail) {
  CheckResult r;
  r.name = name;
  r.measured = measured;
  r.bound = bound;
  r.pass = le ? measured <= bound : measured >= bound;
  r.detail = detail;
  return r;
}

// ---- distributions ----

CheckResult check_unit_mass(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    double atom_mass = 0.0;
    if (d.kind() == DistKind::Mixture)
      for (const auto& c : d.components())
        if (c.sigma == 0.0) atom_mass += c.weight;
    double integral;
    if (d.kind() == DistKind::Grid) {
      const auto& f = d.grid_density();
      integral = 0.0;
      for (std::size_t i = 0; i + 1 < f.size(); ++i) integral += 0.5 * (f[i] + f[i + 1]);
      integral *= d.grid_dx();
    } else {
      auto [lo, hi] = d.support();
      lo -= 1.0;
      hi += 1.0;
      const std::size_t n = 400000;
      const double h = (hi - lo) / static_cast<double>(n);
      integral = 0.0;
      // offset keeps nodes off atom locations
      for (std::size_t i = 0; i <= n; ++i) {
        const double x = lo + h * (static_cast<double>(i) + 0.3151234);
        if (x > hi) break;
        integral += d.pdf(x) * h;
      }
    }
    const double err = std::fabs(integral + atom_mass - 1.0);
    if (err > worst) {
      worst = err;
      where = name;
    }
  }
  return worst_of("distributions/unit_mass", worst, 1e-6, true, "worst fixture: " + where);
}

CheckResult check_quantile_roundtrip(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    if (!is_continuous(d)) continue;
    for (int i = 1; i <= 99; ++i) {
      const double p = static_cast<double>(i) / 100.0;
      const double err = std::fabs(d.cdf(d.quantile(p)) - p);
      if (err > worst) {
        worst = err;
        where = name;
      }
    }
  }
  return worst_of("distributions/quantile_cdf_roundtrip", worst, 1e-6, true,
                  "worst fixture: " + where);
}

CheckResult check_sampling_consistency(unsigned) {
  double worst = 0.0;
  std::string where;
  const std::size_t n = 1000000;
  for (const auto& [name, d] : fixtures()) {
    if (!is_continuous(d)) continue;
    RngStream rng = RngStream::derive(kSuiteSeed, "sampling_" + name);
    std::vector<double> xs = d.sample(n, rng);
    std::sort(xs.begin(), xs.end());
    for (int i = 1; i <= 9; ++i) {
      const double p = static_cast<double>(i) / 10.0;
      const double q = d.quantile(p);
      const auto cnt = std::upper_bound(xs.begin(), xs.end(), q) - xs.begin();
      const double err = std::fabs(static_cast<double>(cnt) / static_cast<double>(n) - p);
      if (err > worst) {
        worst = err;
        where = name;
      }
    }
  }
  return worst_of("distributions/sampling_deciles", worst, 0.005, true, "worst fixture: " + where);
}

CheckResult check_iqr_identity(unsigned) {
  double worst = 0.0;
  for (const auto& [name, d] : fixtures())
    worst = std::max(worst, std::fabs(d.iqr() - (d.quantile(0.75) - d.quantile(0.25))));
  return worst_of("distributions/iqr_identity", worst, 0.0, true, "exact by construction");
}

// ---- smoothing ----

CheckResult check_fisher_upper(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    for (double r : kRadii) {
      const double ratio = smooth_cached(d, r)->fisher_info() * r * r;
      if (ratio > worst) {
        worst = ratio;
        where = name + " r=" + fmt17(r);
      }
    }
  }
  return worst_of("smoothing/fisher_upper_bound", worst, 1.0 + 1e-9, true,
                  "I_r * r^2, worst at " + where);
}

CheckResult check_fisher_lower(unsigned) {
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    const double iqr = d.iqr();
    for (double r : kRadii) {
      const double floor = 0.01 / ((iqr + r) * (iqr + r));
      const double ratio = smooth_cached(d, r)->fisher_info() / floor;
      if (ratio < worst) {
        worst = ratio;
        where = name + " r=" + fmt17(r);
      }
    }
  }
  return worst_of("smoothing/fisher_lower_bound", worst, 1.0, false,
                  "I_r / (0.01/(IQR+r)^2), worst at " + where);
}

CheckResult check_score_deriv_floor(unsigned) {
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    for (double r : kRadii) {
      auto m = smooth_cached(d, r);
      auto [lo, hi] = m->eval_span();
      double min_sd = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 1000; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / 999.0;
        min_sd = std::min(min_sd, m->score_deriv(x));
      }
      const double normalized = min_sd * r * r;  // floor: >= -(1+1e-3)
      if (normalized < worst) {
        worst = normalized;
        where = name + " r=" + fmt17(r);
      }
    }
  }
  return worst_of("smoothing/score_deriv_floor", worst, -(1.0 + 1e-3), false,
                  "min s' * r^2, worst at " + where);
}

CheckResult check_score_consistency(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    if (d.kind() != DistKind::Mixture) continue;  // closed-form path only
    for (double r : kRadii) {
      auto m = smooth_cached(d, r);
      auto [lo, hi] = m->eval_span();
      const double scale = std::sqrt(m->fisher_info());
      const double h = r * 1e-4;
      for (int i = 0; i < 300; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / 299.0;
        const double numeric = (m->log_pdf(x + h) - m->log_pdf(x - h)) / (2.0 * h);
        const double s = m->score(x);
        const double rel = std::fabs(s - numeric) / std::max(std::fabs(s), scale);
        if (rel > worst) {
          worst = rel;
          where = name + " r=" + fmt17(r);
        }
      }
    }
  }
  return worst_of("smoothing/score_consistency", worst, 1e-5, true, "worst at " + where);
}

CheckResult check_expected_score_linearity(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    for (double r : kRadii) {
      auto m = smooth_cached(d, r);
      const double fisher = m->fisher_info();
      const double sq = std::sqrt(fisher);
      for (double div : {64.0, 32.0, 16.0, 8.0}) {
        const double eps = r / div;
        const double residual = std::fabs(m->score_moment(eps, 1) + fisher * eps);
        const double bound = 10.0 * sq * eps * eps / (r * r);
        const double ratio = residual / bound;
        if (ratio > worst) {
          worst = ratio;
          where = name + " r=" + fmt17(r) + " eps=r/" + fmt17(div);
        }
      }
    }
  }
  return worst_of("smoothing/expected_score_linearity", worst, 1.0, true, "worst at " + where);
}

CheckResult check_linearity_quadratic_shrink(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    for (double r : {0.05, 0.5}) {
      auto m = smooth_cached(d, r);
      const double fisher = m->fisher_info();
      auto res = [&](double eps) { return std::fabs(m->score_moment(eps, 1) + fisher * eps); };
      const double r16 = res(r / 16.0);
      const double r8 = res(r / 8.0);
      const double ratio = r8 / (4.5 * r16 + 1e-9 * std::sqrt(fisher));
      if (ratio > worst) {
        worst = ratio;
        where = name + " r=" + fmt17(r);
      }
    }
  }
  return worst_of("smoothing/linearity_quadratic_shrink", worst, 1.0, true, "worst at " + where);
}

CheckResult check_second_moment_stability(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    for (double r : kRadii) {
      auto m = smooth_cached(d, r);
      const double fisher = m->fisher_info();
      const double logterm = std::sqrt(std::max(1.0, std::log(1.0 / (r * r * fisher))));
      for (double div : {64.0, 32.0, 16.0, 8.0}) {
        const double eps = r / div;
        const double m2 = m->score_moment(eps, 2);
        const double bound = fisher * (1.0 + 10.0 * (eps / r) * logterm);
        const double ratio = m2 / bound;
        if (ratio > worst) {
          worst = ratio;
          where = name + " r=" + fmt17(r);
        }
      }
    }
  }
  return worst_of("smoothing/second_moment_stability", worst, 1.0, true, "worst at " + where);
}

CheckResult check_subgamma_moments(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    for (double r : kRadii) {
      auto m = smooth_cached(d, r);
      const double fisher = m->fisher_info();
      for (int k : {3, 4}) {
        const double kfact = k == 3 ? 6.0 : 24.0;
        for (double div : {8.0, 4.0, 2.0}) {
          const double eps = r / div;
          const double mk = m->score_moment(eps, k, true);
          const double m2 = m->score_moment(eps, 2);
          const double bound =
              0.5 * kfact * std::pow(15.0 / r, k - 2) * std::max(m2, fisher);
          const double ratio = mk / bound;
          if (ratio > worst) {
            worst = ratio;
            where = name + " r=" + fmt17(r) + " k=" + std::to_string(k);
          }
        }
      }
    }
  }
  return worst_of("smoothing/subgamma_moments", worst, 1.0, true, "worst at " + where);
}

CheckResult check_centered_moment_bound(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    for (double r : kRadii) {
      auto m = smooth_cached(d, r);
      const double fisher = m->fisher_info();
      for (int k : {3, 4}) {
        const double mk = m->score_moment(0.0, k, true);
        const double bound =
            std::pow(1.6 / r, k - 2) * std::pow(static_cast<double>(k), 0.5 * k) * fisher;
        const double ratio = mk / bound;
        if (ratio > worst) {
          worst = ratio;
          where = name + " r=" + fmt17(r) + " k=" + std::to_string(k);
        }
      }
    }
  }
  return worst_of("smoothing/centered_moment_bound", worst, 1.0, true, "worst at " + where);
}

// ---- estimators ----

CheckResult check_shift_equivariance(unsigned) {
  // Lattice-valued inputs, a power-of-two shift and the zero-noise hook
  // keep every floating-point operation exact, so equality is bitwise.
  const Distribution f = Distribution::gaussian(0.0, 1.0);
  const double r = 0.5;
  auto m = smooth_cached(f, r);
  RngStream gen = RngStream::derive(kSuiteSeed, "equivariance");
  std::vector<double> xs(40);
  for (double& x : xs) {
    double v = 1.0 + 0.5 * gen.normal();
    v = std::clamp(v, 0.0, 2.0);
    x = std::round(v * 1048576.0) / 1048576.0;  // 2^-20 lattice
  }
  const double c = 512.0;
  EstimatorConfig cfg;
  cfg.root_tol = std::pow(2.0, -30);
  const double lo = -1.0, hi = -1.0 + 63.0 / 16.0;

  RngStream z1 = RngStream::zero_noise();
  EstimateResult base = local_mle(*m, xs, lo, hi, z1, cfg);
  std::vector<double> shifted = xs;
  for (double& x : shifted) x += c;
  RngStream z2 = RngStream::zero_noise();
  EstimateResult moved = local_mle(*m, shifted, lo + c, hi + c, z2, cfg);

  const bool exact = moved.lambda_hat == base.lambda_hat + c;

  // Same property under real noise, to interpolation tolerance.
  RngStream n1 = RngStream::derive(kSuiteSeed, "equi_noise");
  RngStream n2 = RngStream::derive(kSuiteSeed, "equi_noise");
  EstimateResult b2 = local_mle(*m, xs, lo, hi, n1, cfg);
  EstimateResult m2 = local_mle(*m, shifted, lo + c, hi + c, n2, cfg);
  const double drift = std::fabs(m2.lambda_hat - (b2.lambda_hat + c));

  CheckResult res;
  res.name = "estimators/shift_equivariance";
  res.pass = exact && drift <= 1e-8;
  res.measured = exact ? drift : std::fabs(moved.lambda_hat - (base.lambda_hat + c));
  res.bound = 0.0;
  res.detail = exact ? "zero-noise case bitwise equal" : "zero-noise case NOT exact";
  return res;
}

CheckResult check_root_validity(unsigned) {
  const Distribution f = Distribution::gaussian();
  auto m = smooth_cached(f, 0.5);
  EstimatorConfig cfg;
  double worst = -1.0;
  for (uint64_t t = 0; t < 50; ++t) {
    RngStream st = RngStream::derive(kSuiteSeed, "root_validity", t);
    std::vector<double> xs = f.sample(200, st);
    RngStream noise = st.child("noise");
    EstimateResult res = local_mle(*m, xs, -3.0, 3.0, noise, cfg);
    if (!res.warnings.empty()) continue;
    RngStream replay = st.child("noise");
    std::vector<double> perturbed = perturb_samples(xs, 0.5, replay);
    const double a = empirical_score(*m, perturbed, res.lambda_hat - cfg.root_tol);
    const double b = empirical_score(*m, perturbed, res.lambda_hat + cfg.root_tol);
    worst = std::max(worst, a * b);
  }
  return worst_of("estimators/root_validity", worst, 0.0, true,
                  "max product of score-sums at lambda_hat +/- root_tol");
}

CheckResult check_theorem1_sign(unsigned workers) {
  const Distribution f = Distribution::gaussian();
  const double delta = 0.01;
  const std::size_t n = 2000;
  const double eps_max = 0.2;
  const double gamma = 5.0;
  const double r = solve_min_smoothing(f, eps_max, delta, n, gamma);
  auto m = smooth_cached(f, r);
  const double rate = std::sqrt(2.0 * std::log(1.0 / delta) /
                                (static_cast<double>(n) * m->fisher_info()));
  std::vector<double> eps_grid;
  for (int i = 1; i <= 16; ++i)
    eps_grid.push_back(1.3 * rate + (eps_max - 1.3 * rate) * static_cast<double>(i) / 16.0);

  const std::size_t trials = 2000;
  std::vector<uint8_t> ok(trials, 0);
  parallel_for(trials, workers, [&](std::size_t t) {
    RngStream st = RngStream::derive(kSuiteSeed, "thm1", t);
    std::vector<double> xs = f.sample(n, st);
    std::vector<double> perturbed = perturb_samples(xs, r, st);
    bool good = true;
    for (double eps : eps_grid) {
      if (!(empirical_score(*m, perturbed, -eps) < 0.0 &&
            empirical_score(*m, perturbed, eps) > 0.0)) {
        good = false;
        break;
      }
    }
    ok[t] = good ? 1 : 0;
  });
  std::size_t hits = 0;
  for (uint8_t v : ok) hits += v;
  const double frac = static_cast<double>(hits) / static_cast<double>(trials);
  return worst_of("estimators/theorem1_sign", frac, 0.98, false,
                  "fraction of trials with correct score signs, r=" + fmt17(r));
}

CheckResult check_coverage(unsigned workers) {
  const double delta = 0.05;
  const std::size_t trials = 2000;
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    if (!is_continuous(d)) continue;
    ExperimentConfig cfg;
    cfg.dist = d;
    cfg.lambda_true = 0.3;
    cfg.n_grid = {1000};
    cfg.delta = delta;
    cfg.trials = trials;
    cfg.seed = kSuiteSeed;
    cfg.workers = workers;
    const auto rows = run_coverage(cfg);
    for (const auto& row : rows) {
      if (row.factor != 1.2) continue;
      const double exceed = 1.0 - row.coverage;
      if (exceed > worst) {
        worst = exceed;
        where = name;
      }
    }
  }
  return worst_of("estimators/coverage_exceedance", worst, 2.0 * delta, true,
                  "worst fixture: " + where);
}

// ---- lower bound ----

CheckResult check_divergence_symmetry(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    if (name != "gaussian" && name != "laplace" && name != "sawtooth_gaussian") continue;
    for (double r : {0.1, 0.5}) {
      auto m = smooth_cached(d, r);
      const double s = r / 8.0;
      const double kl_rel = std::fabs(kl_divergence(*m, s) - kl_divergence(*m, -s)) /
                            std::max(kl_divergence(*m, s), 1e-300);
      const double h_rel = std::fabs(hellinger_sq(*m, s) - hellinger_sq(*m, -s)) /
                           std::max(hellinger_sq(*m, s), 1e-300);
      const double rel = std::max(kl_rel, h_rel);
      if (rel > worst) {
        worst = rel;
        where = name + " r=" + fmt17(r);
      }
    }
  }
  return worst_of("lower_bound/divergence_symmetry", worst, 1e-7, true, "worst at " + where);
}

CheckResult check_hellinger_kl_ordering(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    for (double r : {0.05, 0.5}) {
      auto m = smooth_cached(d, r);
      for (double div : {16.0, 4.0}) {
        const double s = r / div;
        const double h2 = hellinger_sq(*m, s);
        const double half_min_kl =
            0.5 * std::min(kl_divergence(*m, s), kl_divergence(*m, -s));
        const double ratio = h2 / (half_min_kl + 1e-300);
        if (ratio > worst) {
          worst = ratio;
          where = name + " r=" + fmt17(r);
        }
      }
    }
  }
  return worst_of("lower_bound/hellinger_kl_ordering", worst, 1.0 + 1e-9, true,
                  "H^2 / (min KL / 2), worst at " + where);
}

CheckResult check_kl_quadratic_law(unsigned) {
  double worst = 0.0;
  std::string where;
  for (const auto& [name, d] : fixtures()) {
    if (!is_continuous(d)) continue;  // smooth fixtures
    for (double r : kRadii) {
      auto m = smooth_cached(d, r);
      const double eps = r / 64.0;
      const double ratio =
          kl_divergence(*m, 2.0 * eps) / (eps * eps) / (2.0 * m->fisher_info());
      const double dev = std::fabs(ratio - 1.0);
      if (dev > worst) {
        worst = dev;
        where = name + " r=" + fmt17(r);
      }
    }
  }
  return worst_of("lower_bound/kl_quadratic_law", worst, 0.05, true,
                  "|KL(2e)/(2 e^2 I) - 1|, worst at " + where);
}

CheckResult check_tv_oracle(unsigned workers) {
  (void)workers;
  double worst = 0.0;
  std::string where;
  const std::size_t trials = 4000;
  RngStream rng = RngStream::derive(kSuiteSeed, "tv_oracle");
  for (double sigma : {0.5, 1.0, 2.0}) {
    const Distribution atom = Distribution::point_mass(0.0);
    auto m = smooth_cached(atom, sigma);  // exactly N(0, sigma^2)
    for (std::size_t n : {10u, 100u}) {
      for (double shift : {0.05, 0.2}) {
        RngStream st = rng.child("cell", hash_combine(hash_combine(std::bit_cast<uint64_t>(sigma), n),
                                                      std::bit_cast<uint64_t>(shift)));
        const TvEstimate tv = tv_product_mc(*m, shift, n, trials, st);
        const double closed =
            2.0 * norm_sf(0.5 * shift * std::sqrt(static_cast<double>(n)) / sigma);
        const double dev = std::fabs(tv.complement - closed) /
                           std::max(4.0 * tv.std_err, 1e-12);
        if (dev > worst) {
          worst = dev;
          where = "sigma=" + fmt17(sigma) + " n=" + std::to_string(n) + " shift=" + fmt17(shift);
        }
      }
    }
  }
  return worst_of("lower_bound/tv_matches_gaussian_oracle", worst, 1.0, true,
                  "|mc - closed| / (4 stderr), worst at " + where);
}

// Closed-form Gaussian helper: smallest kappa for which all six conditions
// hold between N(0, s^2) and N(2 eps, s^2).
double minimal_kappa_gaussian(double eps, double sigma) {
  const double kl = 2.0 * eps * eps / (sigma * sigma);
  const double mu = -kl;           // gamma mean under p
  const double sg = std::sqrt(2.0 * kl);  // gamma std dev
  const double h2 = 1.0 - std::exp(-kl / 4.0);
  auto abs_moment = [&](int k) {
    const double m = std::fabs(mu) / sg;
    if (k == 2) return sg * sg + mu * mu;
    if (k == 3)
      return sg * sg * sg *
             (std::sqrt(2.0 / M_PI) * (2.0 + m * m) * std::exp(-0.5 * m * m) +
              m * (3.0 + m * m) * (1.0 - 2.0 * norm_cdf(-m)));
    return mu * mu * mu * mu + 6.0 * mu * mu * sg * sg + 3.0 * sg * sg * sg * sg;  // k == 4
  };
  double needed = std::max(h2 / (0.25 * kl) - 1.0, abs_moment(2) / (2.0 * kl) - 1.0);
  needed = std::max(needed, 1e-9);
  // conditions 5-6 relax as kappa grows; bisect the crossing point
  auto ok = [&](double kappa) {
    for (int k : {3, 4}) {
      const double denom = 0.5 * (k == 3 ? 6.0 : 24.0) * 2.0 * kl * std::pow(kappa, k - 2);
      if (abs_moment(k) / denom > 1.0 + kappa) return false;
    }
    return true;
  };
  double lo = needed, hi = std::max(needed, 10.0);
  if (ok(lo)) return lo;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

CheckResult check_delta_floor_c1(unsigned) {
  // Exact Gaussian comparison of the failure-probability floor with C = 1.
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (double log_inv : {3.0, 6.0}) {
    for (std::size_t n : {100u, 1000u}) {
      const double sigma = 1.0;  // I_r = 1
      const double eps = std::sqrt(2.0 * log_inv / static_cast<double>(n));
      const double one_minus_tv = 2.0 * norm_sf(eps * std::sqrt(static_cast<double>(n)) / sigma);
      const double kl = 2.0 * eps * eps / (sigma * sigma);
      const double nkl = static_cast<double>(n) * kl;
      const double kappa = minimal_kappa_gaussian(eps, sigma);
      const double corr = std::max({kappa, 1.0 / std::sqrt(nkl), kl});
      const double floor = 2.0 * std::exp(-(1.0 + corr) * nkl / 4.0);
      const double ratio = one_minus_tv / floor;
      if (ratio < worst) {
        worst = ratio;
        where = "log(1/delta)=" + fmt17(log_inv) + " n=" + std::to_string(n) +
                " kappa=" + fmt17(kappa);
      }
    }
  }
  return worst_of("lower_bound/delta_floor_c1", worst, 1.0, false,
                  "(1-TV)/floor must be >= 1; worst at " + where);
}

// ---- experiments ----

CheckResult check_paired_discipline(unsigned workers) {
  FixtureSpec fs;
  fs.name = FixtureName::SpikedLaplace;
  ExperimentConfig cfg;
  cfg.dist = make_fixture(fs);
  cfg.lambda_true = 0.1;
  cfg.n_grid = {60};
  cfg.r_grid = {0.05};
  cfg.trials = 24;
  cfg.seed = kSuiteSeed;
  cfg.workers = workers;
  cfg.estimators = {EstimatorKind::Mean};
  const auto solo = run_error_distribution(cfg);
  cfg.estimators = {EstimatorKind::SmoothedMle, EstimatorKind::Mean,
                    EstimatorKind::MedianOfMeans};
  const auto joint = run_error_distribution(cfg);
  double worst = 0.0;
  for (std::size_t t = 0; t < cfg.trials; ++t)
    worst = std::max(worst, std::fabs(solo.errors[0][t] - joint.errors[1][t]));
  return worst_of("experiments/paired_sample_discipline", worst, 0.0, true,
                  "mean-estimator errors identical across estimator sets");
}

CheckResult check_heatmap_trend(unsigned workers) {
  FixtureSpec fs;
  fs.name = FixtureName::SpikedLaplace;
  ExperimentConfig cfg;
  cfg.dist = make_fixture(fs);
  cfg.lambda_true = 0.0;
  cfg.n_grid = {200, 1000, 5000};
  cfg.r_grid = log_spaced(0.001, 1.0, 8);
  cfg.trials = 400;
  cfg.seed = kSuiteSeed;
  cfg.workers = workers;
  const auto cells = run_mse_heatmap(cfg);
  auto best_r = [&](std::size_t n) {
    double best = 0.0, best_mse = std::numeric_limits<double>::infinity();
    for (const auto& c : cells)
      if (c.n == n && c.mse < best_mse) {
        best_mse = c.mse;
        best = c.r;
      }
    return best;
  };
  const double step = cfg.r_grid[1] / cfg.r_grid[0];
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < cfg.n_grid.size(); ++i) {
    const double ratio = best_r(cfg.n_grid[i + 1]) / (best_r(cfg.n_grid[i]) * step);
    worst = std::max(worst, ratio);
  }
  return worst_of("experiments/heatmap_best_r_trend", worst, 1.0 + 1e-12, true,
                  "best r must not grow with n beyond one grid step");
}

CheckResult check_csv_stability(unsigned) {
  FixtureSpec fs;
  fs.name = FixtureName::SpikedLaplace;
  ExperimentConfig cfg;
  cfg.dist = make_fixture(fs);
  cfg.n_grid = {50, 120};
  cfg.r_grid = {0.02, 0.2};
  cfg.trials = 12;
  cfg.seed = kSuiteSeed;
  cfg.workers = 1;
  const std::string a = heatmap_csv(run_mse_heatmap(cfg));
  cfg.workers = 8;
  const std::string b = heatmap_csv(run_mse_heatmap(cfg));
  cfg.workers = 3;
  const std::string c = heatmap_csv(run_mse_heatmap(cfg));
  const bool equal = a == b && b == c;
  CheckResult res;
  res.name = "experiments/csv_byte_stability";
  res.pass = equal && a.starts_with("n,r,mse,mean_abs_err,q90,q95,trials,failures\n");
  res.measured = equal ? 0.0 : 1.0;
  res.bound = 0.0;
  res.detail = "identical bytes across worker counts 1, 8, 3";
  return res;
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = {
      {"distributions/unit_mass", check_unit_mass},
      {"distributions/quantile_cdf_roundtrip", check_quantile_roundtrip},
      {"distributions/sampling_deciles", check_sampling_consistency},
      {"distributions/iqr_identity", check_iqr_identity},
      {"smoothing/fisher_upper_bound", check_fisher_upper},
      {"smoothing/fisher_lower_bound", check_fisher_lower},
      {"smoothing/score_deriv_floor", check_score_deriv_floor},
      {"smoothing/score_consistency", check_score_consistency},
      {"smoothing/expected_score_linearity", check_expected_score_linearity},
      {"smoothing/linearity_quadratic_shrink", check_linearity_quadratic_shrink},
      {"smoothing/second_moment_stability", check_second_moment_stability},
      {"smoothing/subgamma_moments", check_subgamma_moments},
      {"smoothing/centered_moment_bound", check_centered_moment_bound},
      {"estimators/shift_equivariance", check_shift_equivariance},
      {"estimators/root_validity", check_root_validity},
      {"estimators/theorem1_sign", check_theorem1_sign},
      {"estimators/coverage_exceedance", check_coverage},
      {"lower_bound/divergence_symmetry", check_divergence_symmetry},
      {"lower_bound/hellinger_kl_ordering", check_hellinger_kl_ordering},
      {"lower_bound/kl_quadratic_law", check_kl_quadratic_law},
      {"lower_bound/tv_matches_gaussian_oracle", check_tv_oracle},
      {"lower_bound/delta_floor_c1", check_delta_floor_c1},
      {"experiments/paired_sample_discipline", check_paired_discipline},
      {"experiments/heatmap_best_r_trend", check_heatmap_trend},
      {"experiments/csv_byte_stability", check_csv_stability},
  };
  return checks;
}

}  // namespace

std::vector<std::string> invariant_names() {
  std::vector<std::string> names;
  for (const auto& c : registry()) names.push_back(c.name);
  return names;
}

std::vector<CheckResult> run_invariants(const std::string& filter, unsigned workers) {
  std::vector<CheckResult> out;
  for (const auto& c : registry()) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    out.push_back(c.fn(workers));
  }
  return out;
}

int report_invariants(const std::vector<CheckResult>& results, std::ostream& os) {
  int failures = 0;
  for (const auto& r : results) {
    os << (r.pass ? "PASS " : "FAIL ") << r.name << " measured=" << fmt17(r.measured)
       << " bound=" << fmt17(r.bound);
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << '\n';
    if (!r.pass) ++failures;
  }
  os << results.size() << " checks, " << failures << " failed\n";
  return failures;
}

}  // namespace locest
