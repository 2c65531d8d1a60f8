#include "locest/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <list>

#include "locest/errors.hpp"
#include "locest/math_util.hpp"
#include "locest/parallel.hpp"
#include "locest/quadrature.hpp"

namespace locest {

namespace {

constexpr double kBinDivisor = 512.0;  // target bin width r / 512
constexpr double kTabDivisor = 32.0;   // eval-table spacing r / 32
constexpr double kTailRadii = 12.0;    // table margin beyond the support
constexpr double kRelCutoff = 1e-22;   // window truncation, relative to peak

double hermite_at(const std::vector<double>& v, const std::vector<double>& d, double x0, double h,
                  double x) {
  const std::size_t n = v.size();
  double t = (x - x0) / h;
  std::size_t i = t <= 0.0 ? 0 : std::min(static_cast<std::size_t>(t), n - 2);
  const double u = t - static_cast<double>(i);
  const double u2 = u * u;
  const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  const double h10 = u * (1.0 - u) * (1.0 - u);
  const double h01 = u2 * (3.0 - 2.0 * u);
  const double h11 = u2 * (u - 1.0);
  return h00 * v[i] + h10 * h * d[i] + h01 * v[i + 1] + h11 * h * d[i + 1];
}

// Point masses on a uniform grid approximating the base distribution.
// Grid cells are subdivided or aggregated toward the target width; masses
// are exact integrals of the underlying density, so spikes keep their
// weight no matter how coarse the stride.
struct MassBuild {
  double c0, step;
  std::vector<double> mass;
};

MassBuild build_mass_from_grid(const Distribution& d, double target) {
  const double dx = d.grid_dx();
  const auto& f = d.grid_density();
  const std::size_t ncell = f.size() - 1;
  MassBuild out;
  if (target >= dx) {
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(target / dx));
    out.step = dx * static_cast<double>(k);
    const std::size_t nb = (ncell + k - 1) / k;
    out.mass.assign(nb, 0.0);
    for (std::size_t i = 0; i < ncell; ++i)
      out.mass[i / k] += 0.5 * dx * (f[i] + f[i + 1]);
    out.c0 = d.grid_x0() + 0.5 * out.step;
  } else {
    const std::size_t s = static_cast<std::size_t>(std::ceil(dx / target));
    out.step = dx / static_cast<double>(s);
    out.mass.assign(ncell * s, 0.0);
    for (std::size_t i = 0; i < ncell; ++i) {
      const double slope = (f[i + 1] - f[i]) / dx;
      for (std::size_t j = 0; j < s; ++j) {
        const double a = out.step * static_cast<double>(j);
        const double b = a + out.step;
        out.mass[i * s + j] = 0.5 * (b - a) * (2.0 * f[i] + slope * (a + b));
      }
    }
    out.c0 = d.grid_x0() + 0.5 * out.step;
  }
  return out;
}

MassBuild build_mass_from_laplace(const Distribution& d, double target) {
  const double b = d.laplace_scale();
  const double half = 25.0 * b;
  double step = std::min(target, b / kBinDivisor);
  const std::size_t max_bins = 1u << 22;
  step = std::max(step, 2.0 * half / static_cast<double>(max_bins));
  const std::size_t nb = static_cast<std::size_t>(std::ceil(2.0 * half / step));
  auto cdf = [b](double x) {
    return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
  };
  MassBuild out;
  out.step = step;
  out.c0 = -half + 0.5 * step;
  out.mass.resize(nb);
  double prev = cdf(-half);
  for (std::size_t i = 0; i < nb; ++i) {
    const double next = cdf(-half + step * static_cast<double>(i + 1));
    out.mass[i] = next - prev;
    prev = next;
  }
  return out;
}

struct ModelKey {
  uint64_t id;
  uint64_t rbits;
  bool operator==(const ModelKey&) const = default;
};

}  // namespace

SmoothedModel::SmoothedModel(Distribution base, double r) : base_(std::move(base)), r_(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidRadius("smooth: radius must be > 0");
  closed_ = base_.kind() == DistKind::Mixture;
  if (closed_) {
    for (const auto& c : base_.components()) {
      const double var = c.sigma * c.sigma + r * r;
      comps_.push_back({c.weight, c.mean, var, std::sqrt(var)});
    }
    return;
  }

  MassBuild mb = base_.kind() == DistKind::Grid
                     ? build_mass_from_grid(base_, r / kBinDivisor)
                     : build_mass_from_laplace(base_, r / kBinDivisor);
  bin_c0_ = mb.c0;
  bin_step_ = mb.step;
  bin_mass_ = std::move(mb.mass);

  const double lo = bin_c0_ - kTailRadii * r;
  const double hi = bin_c0_ + bin_step_ * static_cast<double>(bin_mass_.size() - 1) + kTailRadii * r;
  tab_h_ = r / kTabDivisor;
  std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / tab_h_)) + 1;
  if (n % 2 == 0) ++n;  // composite Simpson wants an odd node count
  tab_x0_ = lo;
  tab_logg_.resize(n);
  tab_s_.resize(n);
  tab_ds_.resize(n);
  parallel_for(n, 0, [&](std::size_t i) {
    const double x = tab_x0_ + tab_h_ * static_cast<double>(i);
    point_direct(x, &tab_logg_[i], &tab_s_[i], &tab_ds_[i]);
  });
}

SmoothedModel::WindowSums SmoothedModel::window_sums(double x) const {
  const std::size_t nb = bin_mass_.size();
  const double inv_r = 1.0 / r_;
  const double delta = bin_step_ * inv_r;
  double idx = (x - bin_c0_) / bin_step_;
  std::size_t j0 = 0;
  if (idx > 0.0) j0 = std::min(static_cast<std::size_t>(idx + 0.5), nb - 1);

  WindowSums ws;
  ws.z0 = (x - (bin_c0_ + bin_step_ * static_cast<double>(j0))) * inv_r;
  const double q = std::exp(-delta * delta);

  // March outward from the nearest bin with the two-multiply Gaussian
  // recurrence; weights are relative to the start bin.
  double w = 1.0, u = std::exp(ws.z0 * delta - 0.5 * delta * delta), z = ws.z0;
  for (std::size_t j = j0;; ++j) {
    const double mw = bin_mass_[j] * w;
    ws.s0 += mw;
    ws.s1 += mw * z;
    ws.s2 += mw * z * z;
    if (j + 1 >= nb) break;
    w *= u;
    u *= q;
    z -= delta;
    if (w < kRelCutoff) break;
  }
  if (j0 > 0) {
    w = 1.0;
    double v = std::exp(-ws.z0 * delta - 0.5 * delta * delta);
    z = ws.z0;
    for (std::size_t j = j0;;) {
      w *= v;
      v *= q;
      z += delta;
      --j;
      const double mw = bin_mass_[j] * w;
      ws.s0 += mw;
      ws.s1 += mw * z;
      ws.s2 += mw * z * z;
      if (j == 0 || w < kRelCutoff) break;
    }
  }
  return ws;
}

void SmoothedModel::point_direct(double x, double* logg, double* s, double* ds) const {
  const WindowSums ws = window_sums(x);
  if (!(ws.s0 > 0.0)) {
    *logg = -std::numeric_limits<double>::infinity();
    *s = 0.0;
    *ds = 0.0;
    return;
  }
  *logg = -0.5 * ws.z0 * ws.z0 + std::log(ws.s0) - std::log(r_) - kLogSqrt2Pi;
  const double m1 = ws.s1 / ws.s0;
  const double m2 = ws.s2 / ws.s0;
  *s = -m1 / r_;
  *ds = (m2 - 1.0 - m1 * m1) / (r_ * r_);
}

double SmoothedModel::log_pdf(double x) const {
  if (closed_) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : comps_) {
      const double z = (x - c.mean) / c.sd;
      best = std::max(best, std::log(c.weight) - std::log(c.sd) + log_norm_pdf(z));
    }
    double acc = 0.0;
    for (const auto& c : comps_) {
      const double z = (x - c.mean) / c.sd;
      acc += std::exp(std::log(c.weight) - std::log(c.sd) + log_norm_pdf(z) - best);
    }
    return best + std::log(acc);
  }
  const double end = tab_x0_ + tab_h_ * static_cast<double>(tab_logg_.size() - 1);
  if (x >= tab_x0_ && x <= end) return hermite_at(tab_logg_, tab_s_, tab_x0_, tab_h_, x);
  double lg, s, ds;
  point_direct(x, &lg, &s, &ds);
  return lg;
}

double SmoothedModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double SmoothedModel::score(double x) const {
  if (closed_) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : comps_) {
      const double z = (x - c.mean) / c.sd;
      best = std::max(best, std::log(c.weight) - std::log(c.sd) - 0.5 * z * z);
    }
    double num = 0.0, den = 0.0;
    for (const auto& c : comps_) {
      const double z = (x - c.mean) / c.sd;
      const double a = std::exp(std::log(c.weight) - std::log(c.sd) - 0.5 * z * z - best);
      den += a;
      num += a * (c.mean - x) / c.var;
    }
    return num / den;
  }
  const double end = tab_x0_ + tab_h_ * static_cast<double>(tab_s_.size() - 1);
  if (x >= tab_x0_ && x <= end) return hermite_at(tab_s_, tab_ds_, tab_x0_, tab_h_, x);
  double lg, s, ds;
  point_direct(x, &lg, &s, &ds);
  return s;
}

double SmoothedModel::score_deriv(double x) const {
  if (closed_) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : comps_) {
      const double z = (x - c.mean) / c.sd;
      best = std::max(best, std::log(c.weight) - std::log(c.sd) - 0.5 * z * z);
    }
    double num1 = 0.0, num2 = 0.0, den = 0.0;
    for (const auto& c : comps_) {
      const double z = (x - c.mean) / c.sd;
      const double a = std::exp(std::log(c.weight) - std::log(c.sd) - 0.5 * z * z - best);
      den += a;
      num1 += a * (c.mean - x) / c.var;
      num2 += a * ((x - c.mean) * (x - c.mean) / (c.var * c.var) - 1.0 / c.var);
    }
    const double s = num1 / den;
    return num2 / den - s * s;
  }
  const double step = r_ * 1e-4;
  return (score(x + step) - score(x - step)) / (2.0 * step);
}

double SmoothedModel::expect_component(const Comp& c, const std::function<double(double)>& F) const {
  constexpr double inv_sqrt_pi = 0.5641895835477562869;
  const double scale = std::sqrt(2.0) * c.sd;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double abs_acc = 0.0;
  for (int n : {32, 64, 128, 256, 512}) {
    const HermiteRule& rule = gauss_hermite(n);
    double acc = 0.0;
    abs_acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double fv = F(c.mean + scale * rule.nodes[j]);
      acc += rule.weights[j] * fv;
      abs_acc += rule.weights[j] * std::fabs(fv);
    }
    acc *= inv_sqrt_pi;
    abs_acc *= inv_sqrt_pi;
    if (!std::isnan(prev) && std::fabs(acc - prev) <= 1e-8 * std::max(abs_acc, 1e-300)) return acc;
    prev = acc;
  }
  // Hermite rules stall on integrands with sharp posterior crossovers;
  // fall back to adaptive refinement on the standardized axis.
  SimpsonOptions opts;
  opts.rel_tol = 1e-9;
  opts.abs_tol = 1e-12 * std::max(abs_acc, 1e-300);
  return adaptive_simpson(
      [&](double t) { return norm_pdf(t) * F(c.mean + c.sd * t); }, -10.0, 10.0, opts);
}

double SmoothedModel::table_integral(
    const std::function<double(std::size_t, double)>& integrand) const {
  const std::size_t n = tab_logg_.size();
  double peak = -std::numeric_limits<double>::infinity();
  for (double lg : tab_logg_) peak = std::max(peak, lg);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rel = tab_logg_[i] - peak;
    if (rel < -700.0) continue;  // below any representable contribution
    const double g = std::exp(rel);
    const double w = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * g * integrand(i, tab_x0_ + tab_h_ * static_cast<double>(i));
  }
  return acc * (tab_h_ / 3.0) * std::exp(peak);
}

double SmoothedModel::expect(const std::function<double(double)>& F) const {
  if (closed_) {
    double acc = 0.0;
    for (const auto& c : comps_) acc += c.weight * expect_component(c, F);
    return acc;
  }
  return table_integral([&](std::size_t, double x) { return F(x); });
}

double SmoothedModel::fisher_info() const {
  std::call_once(fisher_once_, [&] {
    if (closed_) {
      double acc = 0.0;
      for (const auto& c : comps_)
        acc += c.weight * expect_component(c, [&](double x) {
          const double s = score(x);
          return s * s;
        });
      fisher_ = acc;
    } else {
      fisher_ = table_integral([&](std::size_t i, double) { return tab_s_[i] * tab_s_[i]; });
    }
  });
  return fisher_;
}

double SmoothedModel::score_moment(double eps, int k, bool absolute) const {
  if (k < 1) throw InvalidArgument("score_moment: order must be >= 1");
  if (std::fabs(eps) > 0.5 * r_ * (1.0 + 1e-12))
    throw OffsetTooLarge("score_moment: |eps| must be <= r/2");
  auto transform = [k, absolute](double s) {
    double p = absolute ? std::fabs(s) : s;
    double acc = 1.0;
    double base = p;
    int e = k;
    while (e > 0) {  // integer power
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  };
  if (closed_) {
    double acc = 0.0;
    for (const auto& c : comps_)
      acc += c.weight * expect_component(c, [&](double x) { return transform(score(x + eps)); });
    return acc;
  }
  if (eps == 0.0)
    return table_integral([&](std::size_t i, double) { return transform(tab_s_[i]); });
  return table_integral([&](std::size_t, double x) { return transform(score(x + eps)); });
}

std::vector<double> SmoothedModel::sample(std::size_t n, RngStream& rng) const {
  std::vector<double> xs = base_.sample(n, rng);
  for (double& x : xs) x += r_ * rng.normal();
  return xs;
}

std::pair<double, double> SmoothedModel::eval_span() const {
  if (!closed_)
    return {tab_x0_, tab_x0_ + tab_h_ * static_cast<double>(tab_logg_.size() - 1)};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : comps_) {
    lo = std::min(lo, c.mean - 10.0 * c.sd);
    hi = std::max(hi, c.mean + 10.0 * c.sd);
  }
  return {lo, hi};
}

SmoothedModel smooth(const Distribution& d, double r) { return SmoothedModel(d, r); }

std::shared_ptr<const SmoothedModel> smooth_cached(const Distribution& d, double r) {
  struct Entry {
    uint64_t id;
    uint64_t rbits;
    std::shared_ptr<const SmoothedModel> model;
  };
  static std::mutex mu;
  static std::list<Entry> lru;
  constexpr std::size_t kCap = 16;

  uint64_t rbits;
  static_assert(sizeof(rbits) == sizeof(r));
  std::memcpy(&rbits, &r, sizeof(rbits));

  {
    std::lock_guard<std::mutex> lock(mu);
    for (auto it = lru.begin(); it != lru.end(); ++it) {
      if (it->id == d.id() && it->rbits == rbits) {
        lru.splice(lru.begin(), lru, it);
        return lru.front().model;
      }
    }
  }
  auto model = std::make_shared<const SmoothedModel>(d, r);
  {
    std::lock_guard<std::mutex> lock(mu);
    lru.push_front({d.id(), rbits, model});
    while (lru.size() > kCap) lru.pop_back();
  }
  return model;
}

}  // namespace locest
