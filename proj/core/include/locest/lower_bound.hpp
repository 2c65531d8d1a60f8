#pragma once

#include <array>
#include <cstddef>
#include <map>

#include "locest/rng.hpp"
#include "locest/smoothing.hpp"

namespace locest {

/// Which measure a log-likelihood-ratio moment is taken under: the model
/// itself (P) or its shifted copy (Q).
enum class Under { P, Q };

/// Divergences, log-likelihood-ratio moments and condition checks between a
/// smoothed model and its shifted copy, plus the resulting
/// total-variation / failure-probability diagnostics.
struct LowerBoundReport {
  double shift = 0.0;                  // q(x) = p(x - shift)
  double kl_pq = 0.0;                  // KL(p || q), nats
  double kl_qp = 0.0;                  // KL(q || p), nats
  double hellinger_sq = 0.0;           // squared Hellinger distance
  std::map<int, double> gamma_moments_p;  // order -> E_p |log(q/p)|^k
  std::map<int, double> gamma_moments_q;  // order -> E_q |log(q/p)|^k
  double kappa = 0.0;

  std::array<bool, 6> conditions{};    // pass/fail per condition
  std::array<double, 6> ratios{};      // measured ratio, pass iff <= 1 + kappa

  double tv_complement_estimate = -1.0;  // 1 - TV of the n-fold products, if estimated
  double tv_complement_stderr = 0.0;
  double delta_floor = 0.0;            // diagnostic failure-probability floor
  std::size_t n = 0;
};

/// KL(f_r || f_r shifted); evaluated through the score, which keeps the
/// near-cancellation of the log-ratio exact. Negative shifts are allowed.
double kl_divergence(const SmoothedModel& m, double shift);

/// Squared Hellinger distance between f_r and its shifted copy.
double hellinger_sq(const SmoothedModel& m, double shift);

/// E[|log(q/p)|^k] under P or Q, k >= 2.
double loglik_moment(const SmoothedModel& m, double shift, int k, Under under);

struct NewLbOptions {
  std::size_t n = 0;   // when > 0, the delta floor is evaluated for n samples
  double floor_c = 1.0;  // multiplier on the floor's correction term
};

/// Evaluates the six moment/divergence conditions between p = f_r and
/// q = f_r shifted by 2*eps, recording measured ratios. Requires eps > 0
/// (ShiftZero otherwise) and eps <= r/4.
LowerBoundReport check_newlb_conditions(const SmoothedModel& m, double eps, double kappa,
                                        int kmax, const NewLbOptions& opts = {});

struct TvEstimate {
  double complement = 0.0;  // estimate of 1 - TV(p^n, q^n)
  double std_err = 0.0;
};

/// Monte Carlo estimate of 1 - TV between n-fold products via
/// E_p[min(1, prod q/p)], with log-space likelihood accumulation.
TvEstimate tv_product_mc(const SmoothedModel& m, double shift, std::size_t n,
                         std::size_t trials, RngStream& rng);

/// Leading-order indistinguishable half-shift sqrt(2 log(1/delta)/(n I_r)).
double indistinguishable_shift(std::size_t n, double delta, double fisher_r);

/// Magnitudes of the three leading correction terms attached to the
/// indistinguishable shift; diagnostics only.
struct ShiftCorrections {
  double sampling = 0.0;   // sqrt(log(1/d)/n) / (r^3 I^{3/2})
  double log_term = 0.0;   // 1 / log(1/d)
  double budget = 0.0;     // log(1/d) / n
};
ShiftCorrections shift_corrections(std::size_t n, double delta, double r, double fisher_r);

}  // namespace locest
