#include "locest/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "locest/errors.hpp"
#include "locest/math_util.hpp"
#include "locest/parallel.hpp"
#include "locest/quadrature.hpp"

namespace locest {

namespace {

// log q(x) - log p(x) with q(x) = p(x - shift), written as the integral of
// the score so that the difference of nearly equal log-densities never
// cancels: gamma(x) = -int_0^shift s(x - t) dt.
double log_ratio(const SmoothedModel& m, double shift, double x) {
  if (shift == 0.0) return 0.0;
  return -gl8_integrate([&](double t) { return m.score(x - t); }, 0.0, shift);
}

int factorial(int k) {
  int acc = 1;
  for (int i = 2; i <= k; ++i) acc *= i;
  return acc;
}

}  // namespace

double kl_divergence(const SmoothedModel& m, double shift) {
  if (shift == 0.0) return 0.0;
  // KL(p||q) = -E_p[gamma] = int_0^shift E_p[s(x - t)] dt.
  const double kl = gl8_integrate(
      [&](double t) {
        return m.expect([&](double x) { return m.score(x - t); });
      },
      0.0, shift);
  return std::max(kl, 0.0);
}

double hellinger_sq(const SmoothedModel& m, double shift) {
  if (shift == 0.0) return 0.0;
  const double h2 = -m.expect([&](double x) { return std::expm1(0.5 * log_ratio(m, shift, x)); });
  return std::clamp(h2, 0.0, 1.0);
}

double loglik_moment(const SmoothedModel& m, double shift, int k, Under under) {
  if (k < 2) throw InvalidArgument("loglik_moment: order must be >= 2");
  if (shift == 0.0) return 0.0;
  auto powk = [k](double g) {
    double p = std::fabs(g);
    double acc = 1.0;
    double base = p;
    int e = k;
    while (e > 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  };
  if (under == Under::P)
    return m.expect([&](double x) { return powk(log_ratio(m, shift, x)); });
  // Under Q = shifted P: E_q[F(X)] = E_p[F(U + shift)].
  return m.expect([&](double u) { return powk(log_ratio(m, shift, u + shift)); });
}

LowerBoundReport check_newlb_conditions(const SmoothedModel& m, double eps, double kappa,
                                        int kmax, const NewLbOptions& opts) {
  if (eps == 0.0) throw ShiftZero("check_newlb_conditions: conditions degenerate at eps = 0");
  if (!(eps > 0.0)) throw InvalidArgument("check_newlb_conditions: eps must be > 0");
  if (!(kappa > 0.0)) throw InvalidArgument("check_newlb_conditions: kappa must be > 0");
  if (!(eps <= 0.25 * m.radius() * (1.0 + 1e-12)))
    throw OffsetTooLarge("check_newlb_conditions: eps must be <= r/4");
  if (kmax < 3) throw InvalidArgument("check_newlb_conditions: kmax must be >= 3");

  LowerBoundReport rep;
  rep.shift = 2.0 * eps;
  rep.kappa = kappa;
  rep.n = opts.n;
  rep.kl_pq = kl_divergence(m, rep.shift);
  rep.kl_qp = kl_divergence(m, -rep.shift);  // reverse direction by shift symmetry
  rep.hellinger_sq = hellinger_sq(m, rep.shift);
  for (int k = 2; k <= kmax; ++k) {
    rep.gamma_moments_p[k] = loglik_moment(m, rep.shift, k, Under::P);
    rep.gamma_moments_q[k] = loglik_moment(m, rep.shift, k, Under::Q);
  }

  rep.ratios[0] = rep.hellinger_sq / (0.25 * rep.kl_pq);
  rep.ratios[1] = std::max(rep.kl_pq / rep.kl_qp, rep.kl_qp / rep.kl_pq);
  rep.ratios[2] = rep.gamma_moments_p.at(2) / (2.0 * rep.kl_pq);
  rep.ratios[3] = rep.gamma_moments_q.at(2) / (2.0 * rep.kl_pq);
  double worst_p = 0.0, worst_q = 0.0;
  for (int k = 3; k <= kmax; ++k) {
    const double denom =
        0.5 * factorial(k) * 2.0 * rep.kl_pq * std::pow(kappa, static_cast<double>(k - 2));
    worst_p = std::max(worst_p, rep.gamma_moments_p.at(k) / denom);
    worst_q = std::max(worst_q, rep.gamma_moments_q.at(k) / denom);
  }
  rep.ratios[4] = worst_p;
  rep.ratios[5] = worst_q;
  for (int i = 0; i < 6; ++i) rep.conditions[i] = rep.ratios[i] <= 1.0 + kappa;

  if (opts.n > 0) {
    const double nkl = static_cast<double>(opts.n) * rep.kl_pq;
    const double corr = std::max({kappa, 1.0 / std::sqrt(nkl), rep.kl_pq});
    rep.delta_floor = 2.0 * std::exp(-(1.0 + opts.floor_c * corr) * nkl / 4.0);
  }
  return rep;
}

TvEstimate tv_product_mc(const SmoothedModel& m, double shift, std::size_t n,
                         std::size_t trials, RngStream& rng) {
  if (trials < 1000) throw InvalidArgument("tv_product_mc: need at least 1000 trials");
  if (n < 1) throw InvalidArgument("tv_product_mc: need n >= 1");
  std::vector<double> vals(trials);
  parallel_for(trials, 0, [&](std::size_t t) {
    RngStream st = rng.child("tv_trial", t);
    std::vector<double> xs = m.sample(n, st);
    double log_lr = 0.0;
    for (double x : xs) log_lr += log_ratio(m, shift, x);
    vals[t] = log_lr >= 0.0 ? 1.0 : std::exp(log_lr);
  });
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(trials > 1 ? trials - 1 : 1);
  return {mean, std::sqrt(var / static_cast<double>(trials))};
}

double indistinguishable_shift(std::size_t n, double delta, double fisher_r) {
  if (!(n >= 1) || !(delta > 0.0 && delta < 1.0) || !(fisher_r > 0.0))
    throw InvalidArgument("indistinguishable_shift: all arguments must be positive");
  return std::sqrt(2.0 * std::log(1.0 / delta) / (static_cast<double>(n) * fisher_r));
}

ShiftCorrections shift_corrections(std::size_t n, double delta, double r, double fisher_r) {
  ShiftCorrections c;
  const double log_inv = std::log(1.0 / delta);
  c.sampling = std::sqrt(log_inv / static_cast<double>(n)) /
               (r * r * r * fisher_r * std::sqrt(fisher_r));
  c.log_term = 1.0 / log_inv;
  c.budget = log_inv / static_cast<double>(n);
  return c;
}

}  // namespace locest
