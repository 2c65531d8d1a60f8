#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "locest/rng.hpp"

namespace locest {

enum class DistKind { Mixture, Laplace, Grid };

/// One Gaussian (or point-mass, when sigma == 0) mixture component.
struct MixtureComponent {
  double weight = 1.0;
  double mean = 0.0;
  double sigma = 1.0;
};

/// Immutable base model for a shift family f(x - lambda).
///
/// Three representations are supported: Gaussian/atom mixtures (closed
/// forms everywhere), the analytic Laplace family, and a grid-discretized
/// pdf with piecewise-linear density and exact trapezoid CDF. Values are
/// cheap to copy and safe to share across threads.
class Distribution {
 public:
  static Distribution mixture(std::vector<MixtureComponent> components);
  static Distribution gaussian(double mean = 0.0, double sigma = 1.0);
  static Distribution point_mass(double loc);
  static Distribution laplace(double scale);
  /// Grid pdf; density values are renormalized to unit trapezoid mass.
  static Distribution grid(double x0, double dx, std::vector<double> density);

  DistKind kind() const;
  /// Stable identity of the underlying immutable value, used for caching.
  uint64_t id() const;

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  /// Left-continuous generalized inverse: inf{x : cdf(x) >= p}, p in (0,1).
  double quantile(double p) const;
  double iqr() const;
  std::vector<double> sample(std::size_t n, RngStream& rng) const;

  bool has_atoms() const;
  /// Numeric support [lo, hi] outside which the density is negligible.
  std::pair<double, double> support() const;
  /// Width of the narrowest density feature; bounds the resolution needed
  /// by likelihood scans. Falls back to the IQR for featureless densities.
  double min_feature_scale() const;

  const std::vector<MixtureComponent>& components() const;  // Mixture only
  double laplace_scale() const;                             // Laplace only
  double grid_x0() const;                                   // Grid only
  double grid_dx() const;
  const std::vector<double>& grid_density() const;

 private:
  struct Impl;
  explicit Distribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace locest
