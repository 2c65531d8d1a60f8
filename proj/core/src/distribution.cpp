#include "locest/distribution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

#include "locest/errors.hpp"
#include "locest/math_util.hpp"

namespace locest {

namespace {

std::atomic<uint64_t> g_next_id{1};

constexpr double kAtomEps = 0.0;  // sigma == 0 denotes an atom

}  // namespace

struct Distribution::Impl {
  uint64_t id = g_next_id.fetch_add(1);
  DistKind kind;

  // Mixture
  std::vector<MixtureComponent> comps;

  // Laplace
  double scale = 0.0;

  // Grid
  double x0 = 0.0;
  double dx = 0.0;
  std::vector<double> density;
  std::vector<double> cell_mass;    // per-cell trapezoid mass
  std::vector<double> mass_prefix;  // prefix[i] = mass of cells [0, i)

  mutable std::once_flag feature_once;
  mutable double feature_scale = std::numeric_limits<double>::infinity();

  double grid_end() const { return x0 + dx * static_cast<double>(density.size() - 1); }
};

Distribution Distribution::mixture(std::vector<MixtureComponent> components) {
  if (components.empty()) throw InvalidDistribution("mixture: needs at least one component");
  double wsum = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight))
      throw InvalidDistribution("mixture: weights must be > 0");
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma) || !std::isfinite(c.mean))
      throw InvalidDistribution("mixture: bad component parameters");
    wsum += c.weight;
  }
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw InvalidDistribution("mixture: weights must sum to 1 within 1e-12");
  auto impl = std::make_shared<Impl>();
  impl->kind = DistKind::Mixture;
  impl->comps = std::move(components);
  return Distribution(std::move(impl));
}

Distribution Distribution::gaussian(double mean, double sigma) {
  if (!(sigma > 0.0)) throw InvalidDistribution("gaussian: sigma must be > 0");
  return mixture({MixtureComponent{1.0, mean, sigma}});
}

Distribution Distribution::point_mass(double loc) {
  return mixture({MixtureComponent{1.0, loc, kAtomEps}});
}

Distribution Distribution::laplace(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InvalidDistribution("laplace: scale must be > 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = DistKind::Laplace;
  impl->scale = scale;
  return Distribution(std::move(impl));
}

Distribution Distribution::grid(double x0, double dx, std::vector<double> density) {
  if (!(dx > 0.0) || !std::isfinite(x0) || !std::isfinite(dx))
    throw InvalidDistribution("grid: dx must be > 0");
  if (density.size() < 2) throw InvalidDistribution("grid: needs at least two nodes");
  double integral = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double v = density[i];
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidDistribution("grid: density must be >= 0");
    integral += (i == 0 || i + 1 == density.size()) ? 0.5 * v : v;
  }
  integral *= dx;
  if (!(integral > 0.0)) throw InvalidDistribution("grid: density integrates to zero");
  for (auto& v : density) v /= integral;

  auto impl = std::make_shared<Impl>();
  impl->kind = DistKind::Grid;
  impl->x0 = x0;
  impl->dx = dx;
  impl->density = std::move(density);
  const std::size_t ncell = impl->density.size() - 1;
  impl->cell_mass.resize(ncell);
  impl->mass_prefix.resize(ncell + 1);
  impl->mass_prefix[0] = 0.0;
  for (std::size_t i = 0; i < ncell; ++i) {
    impl->cell_mass[i] = 0.5 * dx * (impl->density[i] + impl->density[i + 1]);
    impl->mass_prefix[i + 1] = impl->mass_prefix[i] + impl->cell_mass[i];
  }
  return Distribution(std::move(impl));
}

DistKind Distribution::kind() const { return impl_->kind; }
uint64_t Distribution::id() const { return impl_->id; }

const std::vector<MixtureComponent>& Distribution::components() const {
  if (impl_->kind != DistKind::Mixture) throw InvalidArgument("components: not a mixture");
  return impl_->comps;
}

double Distribution::laplace_scale() const {
  if (impl_->kind != DistKind::Laplace) throw InvalidArgument("laplace_scale: not a laplace");
  return impl_->scale;
}

double Distribution::grid_x0() const {
  if (impl_->kind != DistKind::Grid) throw InvalidArgument("grid_x0: not a grid");
  return impl_->x0;
}
double Distribution::grid_dx() const {
  if (impl_->kind != DistKind::Grid) throw InvalidArgument("grid_dx: not a grid");
  return impl_->dx;
}
const std::vector<double>& Distribution::grid_density() const {
  if (impl_->kind != DistKind::Grid) throw InvalidArgument("grid_density: not a grid");
  return impl_->density;
}

bool Distribution::has_atoms() const {
  if (impl_->kind != DistKind::Mixture) return false;
  for (const auto& c : impl_->comps)
    if (c.sigma == 0.0) return true;
  return false;
}

double Distribution::pdf(double x) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case DistKind::Mixture: {
      double acc = 0.0;
      for (const auto& c : im.comps) {
        if (c.sigma == 0.0) {
          if (x == c.mean)
            throw AtomDensityUndefined("pdf: density at a point mass is undefined");
          continue;
        }
        acc += c.weight * norm_pdf((x - c.mean) / c.sigma) / c.sigma;
      }
      return acc;
    }
    case DistKind::Laplace:
      return 0.5 / im.scale * std::exp(-std::fabs(x) / im.scale);
    case DistKind::Grid: {
      if (x < im.x0 || x > im.grid_end()) return 0.0;
      const double t = (x - im.x0) / im.dx;
      const std::size_t i = std::min(static_cast<std::size_t>(t), im.density.size() - 2);
      const double frac = t - static_cast<double>(i);
      return im.density[i] * (1.0 - frac) + im.density[i + 1] * frac;
    }
  }
  return 0.0;
}

double Distribution::log_pdf(double x) const {
  const Impl& im = *impl_;
  if (im.kind == DistKind::Laplace) return -std::log(2.0 * im.scale) - std::fabs(x) / im.scale;
  if (im.kind == DistKind::Mixture) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : im.comps) {
      if (c.sigma == 0.0) {
        if (x == c.mean)
          throw AtomDensityUndefined("log_pdf: density at a point mass is undefined");
        continue;
      }
      const double z = (x - c.mean) / c.sigma;
      best = std::max(best, std::log(c.weight) - std::log(c.sigma) + log_norm_pdf(z));
    }
    if (std::isinf(best)) return best;
    double acc = 0.0;
    for (const auto& c : im.comps) {
      if (c.sigma == 0.0) continue;
      const double z = (x - c.mean) / c.sigma;
      acc += std::exp(std::log(c.weight) - std::log(c.sigma) + log_norm_pdf(z) - best);
    }
    return best + std::log(acc);
  }
  return std::log(pdf(x));
}

double Distribution::cdf(double x) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case DistKind::Mixture: {
      double acc = 0.0;
      for (const auto& c : im.comps) {
        if (c.sigma == 0.0)
          acc += x >= c.mean ? c.weight : 0.0;  // right-continuous at atoms
        else
          acc += c.weight * norm_cdf((x - c.mean) / c.sigma);
      }
      return acc;
    }
    case DistKind::Laplace: {
      const double b = im.scale;
      return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
    }
    case DistKind::Grid: {
      if (x <= im.x0) return 0.0;
      if (x >= im.grid_end()) return 1.0;
      const double t = (x - im.x0) / im.dx;
      const std::size_t i = std::min(static_cast<std::size_t>(t), im.density.size() - 2);
      const double u = (t - static_cast<double>(i)) * im.dx;  // offset within cell
      const double f0 = im.density[i];
      const double slope = (im.density[i + 1] - f0) / im.dx;
      return im.mass_prefix[i] + f0 * u + 0.5 * slope * u * u;
    }
  }
  return 0.0;
}

double Distribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidProbability("quantile: p must be in (0,1)");
  const Impl& im = *impl_;
  switch (im.kind) {
    case DistKind::Mixture: {
      if (im.comps.size() == 1 && im.comps[0].sigma > 0.0)
        return im.comps[0].mean + im.comps[0].sigma * norm_quantile(p);
      auto [lo, hi] = support();
      lo -= 1.0;
      hi += 1.0;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (cdf(mid) >= p)
          hi = mid;
        else
          lo = mid;
      }
      return hi;
    }
    case DistKind::Laplace: {
      const double b = im.scale;
      return p < 0.5 ? b * std::log(2.0 * p) : -b * std::log(2.0 * (1.0 - p));
    }
    case DistKind::Grid: {
      const auto& pre = im.mass_prefix;
      const auto it = std::lower_bound(pre.begin(), pre.end(), p);
      std::size_t i = it == pre.begin() ? 0 : static_cast<std::size_t>(it - pre.begin()) - 1;
      i = std::min(i, im.cell_mass.size() - 1);
      const double target = p - pre[i];
      const double f0 = im.density[i];
      const double slope = (im.density[i + 1] - f0) / im.dx;
      double u;
      if (std::fabs(slope) < 1e-300 * std::max(1.0, f0)) {
        u = f0 > 0.0 ? target / f0 : 0.0;
      } else {
        const double disc = f0 * f0 + 2.0 * slope * target;
        u = (-f0 + std::sqrt(std::max(0.0, disc))) / slope;
      }
      u = std::clamp(u, 0.0, im.dx);
      return im.x0 + im.dx * static_cast<double>(i) + u;
    }
  }
  return 0.0;
}

double Distribution::iqr() const { return quantile(0.75) - quantile(0.25); }

std::vector<double> Distribution::sample(std::size_t n, RngStream& rng) const {
  const Impl& im = *impl_;
  std::vector<double> out;
  out.reserve(n);
  switch (im.kind) {
    case DistKind::Mixture: {
      std::vector<double> cum;
      cum.reserve(im.comps.size());
      double acc = 0.0;
      for (const auto& c : im.comps) cum.push_back(acc += c.weight);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        std::size_t k = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        if (k >= im.comps.size()) k = im.comps.size() - 1;
        const auto& c = im.comps[k];
        const double z = rng.normal();
        out.push_back(c.mean + c.sigma * z);
      }
      break;
    }
    case DistKind::Laplace:
    case DistKind::Grid:
      for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(rng.uniform()));
      break;
  }
  return out;
}

std::pair<double, double> Distribution::support() const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case DistKind::Mixture: {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& c : im.comps) {
        lo = std::min(lo, c.mean - 50.0 * c.sigma);
        hi = std::max(hi, c.mean + 50.0 * c.sigma);
      }
      return {lo, hi};
    }
    case DistKind::Laplace:
      return {-27.0 * im.scale, 27.0 * im.scale};
    case DistKind::Grid:
      return {im.x0, im.grid_end()};
  }
  return {0.0, 0.0};
}

namespace {

// Narrow spikes force likelihood scans onto fine grids; detect the thinnest
// bump that rises well above the local baseline.
double detect_grid_feature(const std::vector<double>& d, double dx) {
  const std::size_t n = d.size();
  const std::size_t half = std::max<std::size_t>(8, n / 256);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + d[i];
  auto baseline = [&](std::size_t i) {
    const std::size_t a = i > half ? i - half : 0;
    const std::size_t b = std::min(n, i + half + 1);
    return (prefix[b] - prefix[a]) / static_cast<double>(b - a);
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(d[i] >= d[i - 1] && d[i] >= d[i + 1])) continue;
    const double base = baseline(i);
    if (!(d[i] > 6.0 * base + 1e-300)) continue;
    const double cut = base + 0.5 * (d[i] - base);
    std::size_t l = i, r = i;
    while (l > 0 && d[l] > cut) --l;
    while (r + 1 < n && d[r] > cut) ++r;
    best = std::min(best, dx * static_cast<double>(r - l));
  }
  return best;
}

}  // namespace

double Distribution::min_feature_scale() const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case DistKind::Mixture: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : im.comps)
        if (c.sigma > 0.0) best = std::min(best, c.sigma);
      return std::min(best, std::max(iqr(), 1e-300));
    }
    case DistKind::Laplace:
      return im.scale;
    case DistKind::Grid: {
      std::call_once(im.feature_once, [&] {
        im.feature_scale = detect_grid_feature(im.density, im.dx);
      });
      return std::min(im.feature_scale, std::max(iqr(), 1e-300));
    }
  }
  return 1.0;
}

}  // namespace locest
