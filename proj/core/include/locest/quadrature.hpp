#pragma once

#include <functional>
#include <vector>

namespace locest {

struct SimpsonOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  int max_depth = 46;
};

/// Adaptive Simpson integration of f over [a, b].
/// Throws QuadratureFailure when the depth budget is exhausted before the
/// local error estimate falls under the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const SimpsonOptions& opts = {});

/// Gauss-Hermite rule for weight e^{-t^2}: integral ~= sum w_j f(t_j).
/// Rules are computed once per node count and cached.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const HermiteRule& gauss_hermite(int n);

struct GaussPoint {
  double node;    // in [-1, 1]
  double weight;
};

/// Fixed 8-point Gauss-Legendre rule on [-1, 1].
const std::vector<GaussPoint>& gauss_legendre8();

/// Integrates f over [a, b] with the 8-point Gauss-Legendre rule.
double gl8_integrate(const std::function<double(double)>& f, double a, double b);

}  // namespace locest
