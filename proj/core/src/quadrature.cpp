#include "locest/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "locest/errors.hpp"

namespace locest {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * eps || !(std::isfinite(delta))) {
    if (!std::isfinite(delta)) throw QuadratureFailure("adaptive_simpson: non-finite integrand");
    return left + right + delta / 15.0;
  }
  if (depth <= 0) throw QuadratureFailure("adaptive_simpson: max refinement depth reached");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const SimpsonOptions& opts) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double eps = std::max(opts.abs_tol, opts.rel_tol * std::max(std::fabs(whole), 1e-300));
  return simpson_rec(f, a, b, fa, fm, fb, whole, eps, opts.max_depth);
}

namespace {

// Roots and weights of the physicists' Hermite polynomials via Newton
// iteration on the orthonormal recurrence.
HermiteRule compute_hermite(int n) {
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  const double pim4 = 0.7511255444649424828;  // pi^{-1/4}
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

}  // namespace

const HermiteRule& gauss_hermite(int n) {
  static std::map<int, HermiteRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_hermite(n)).first;
  return it->second;
}

const std::vector<GaussPoint>& gauss_legendre8() {
  static const std::vector<GaussPoint> pts = {
      {-0.9602898564975363, 0.1012285362903763}, {-0.7966664774136267, 0.2223810344533745},
      {-0.5255324099163290, 0.3137066458778873}, {-0.1834346424956498, 0.3626837833783620},
      {0.1834346424956498, 0.3626837833783620},  {0.5255324099163290, 0.3137066458778873},
      {0.7966664774136267, 0.2223810344533745},  {0.9602898564975363, 0.1012285362903763}};
  return pts;
}

double gl8_integrate(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double acc = 0.0;
  for (const auto& p : gauss_legendre8()) acc += p.weight * f(c + h * p.node);
  return acc * h;
}

}  // namespace locest
