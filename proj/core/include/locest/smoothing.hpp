#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "locest/distribution.hpp"
#include "locest/rng.hpp"

namespace locest {

/// Gaussian-smoothed model: the law of X + Z where X follows the base
/// distribution and Z is independent N(0, r^2).
///
/// Gaussian/atom mixtures smooth in closed form (each component variance
/// becomes sigma^2 + r^2). Laplace and grid bases go through one numeric
/// path: the base is reduced to a fine grid of point masses, and the
/// smoothed log-density, score and score derivative are tabulated on a
/// grid of spacing r/32 spanning the support extended by 12r; pointwise
/// queries interpolate the table with cubic Hermite splines whose node
/// derivatives are exact.
///
/// Instances are immutable after the first fisher_info() call and safe for
/// concurrent readers.
class SmoothedModel {
 public:
  /// Throws InvalidRadius unless r > 0.
  SmoothedModel(Distribution base, double r);

  const Distribution& base() const { return base_; }
  double radius() const { return r_; }
  bool closed_form() const { return closed_; }

  double pdf(double x) const;
  double log_pdf(double x) const;
  /// Score s(x) = f_r'(x) / f_r(x).
  double score(double x) const;
  /// Derivative of the score; analytic for closed forms, central
  /// difference with step r * 1e-4 on the numeric path.
  double score_deriv(double x) const;

  /// Fisher information E[s(x)^2]; computed once and cached.
  double fisher_info() const;

  /// E[s(x+eps)^k] (signed), or E[|s(x+eps)|^k] when absolute is set.
  /// Requires |eps| <= r/2 and k >= 1.
  double score_moment(double eps, int k, bool absolute = false) const;

  /// E_{x ~ f_r}[F(x)] by the model's quadrature.
  double expect(const std::function<double(double)>& F) const;

  /// Draws from the smoothed law: base sample plus N(0, r^2) noise.
  std::vector<double> sample(std::size_t n, RngStream& rng) const;

  /// Range over which the model is tabulated (support extended by 12r).
  std::pair<double, double> eval_span() const;

 private:
  struct Comp {
    double weight, mean, var, sd;
  };
  struct WindowSums {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, z0 = 0.0;
  };

  WindowSums window_sums(double x) const;
  void point_direct(double x, double* logg, double* s, double* ds) const;
  double expect_component(const Comp& c, const std::function<double(double)>& F) const;
  double table_integral(const std::function<double(std::size_t, double)>& integrand) const;

  Distribution base_;
  double r_;
  bool closed_;

  std::vector<Comp> comps_;

  // numeric path: point masses at bin_c0 + j * bin_step
  double bin_c0_ = 0.0, bin_step_ = 0.0;
  std::vector<double> bin_mass_;
  // tabulated (log f_r, score, score') at tab_x0 + i * tab_h
  double tab_x0_ = 0.0, tab_h_ = 0.0;
  std::vector<double> tab_logg_, tab_s_, tab_ds_;

  mutable std::once_flag fisher_once_;
  mutable double fisher_ = 0.0;
};

/// Builds the r-smoothed model for a base distribution.
SmoothedModel smooth(const Distribution& d, double r);

/// Process-wide memoized builder keyed on (distribution identity, r).
std::shared_ptr<const SmoothedModel> smooth_cached(const Distribution& d, double r);

}  // namespace locest
