#include "locest/fixtures.hpp"

#include <cmath>
#include <functional>

#include "locest/errors.hpp"
#include "locest/math_util.hpp"

namespace locest {

namespace {

constexpr std::size_t kGridPoints = 1u << 20;

std::vector<double> linspace_density(double lo, double hi, std::size_t n,
                                     const std::function<double(double)>& f) {
  std::vector<double> d(n);
  const double dx = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) d[i] = f(lo + dx * static_cast<double>(i));
  return d;
}

double laplace_pdf(double x, double b) { return 0.5 / b * std::exp(-std::fabs(x) / b); }

// Triangle wave with slope +/-slope alternating over teeth of the given
// width; continuous, zero mean over each period.
double sawtooth_wave(double x, double slope, double w) {
  const double period = 2.0 * w;
  double m = std::fmod(x + 0.5 * w, period);
  if (m < 0.0) m += period;
  return slope * (std::fabs(m - w) - 0.5 * w);
}

Distribution make_spiked_laplace(const FixtureSpec& s) {
  if (!(s.mass >= 0.0 && s.mass < 1.0)) throw InvalidFixture("spiked_laplace: mass must be in [0,1)");
  if (!(s.width > 0.0)) throw InvalidFixture("spiked_laplace: width must be > 0");
  if (!(s.scale > 0.0)) throw InvalidFixture("spiked_laplace: scale must be > 0");
  if (s.mass == 0.0) return Distribution::laplace(s.scale);  // degenerate spike

  // Span roughly mean +/- 12 effective standard deviations, wide enough to
  // cover both the body and the spike.
  const double sd = std::sqrt((1.0 - s.mass) * 2.0 * s.scale * s.scale +
                              s.mass * (s.loc * s.loc + s.width * s.width));
  const double half = std::max(12.0 * sd, std::fabs(s.loc) + 12.0 * s.width);
  auto f = [&](double x) {
    const double spike = s.mass * norm_pdf((x - s.loc) / s.width) / s.width;
    return (1.0 - s.mass) * laplace_pdf(x, s.scale) + spike;
  };
  return Distribution::grid(-half, 2.0 * half / static_cast<double>(kGridPoints - 1),
                            linspace_density(-half, half, kGridPoints, f));
}

Distribution make_sawtooth_gaussian(const FixtureSpec& s) {
  if (!(s.tooth_width > 0.0)) throw InvalidFixture("sawtooth_gaussian: tooth width must be > 0");
  if (!(s.region > 0.0)) throw InvalidFixture("sawtooth_gaussian: region must be > 0");
  if (!(s.slope >= 0.0)) throw InvalidFixture("sawtooth_gaussian: slope must be >= 0");

  const double half = 12.0;
  const std::size_t n = kGridPoints;
  const double dx = 2.0 * half / static_cast<double>(n - 1);
  std::vector<double> d(n);
  double clipped = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -half + dx * static_cast<double>(i);
    double v = norm_pdf(x);
    if (std::fabs(x) <= s.region) v += sawtooth_wave(x, s.slope, s.tooth_width);
    if (v < 0.0) {
      clipped -= v * dx;
      v = 0.0;
    }
    d[i] = v;
    total += v * dx;
  }
  // Clamping keeps the density valid for aggressive slopes, but past a
  // small mass budget the fixture no longer resembles the request.
  if (clipped > 0.01 * total)
    throw InvalidFixture("sawtooth_gaussian: parameters drive density below 0 beyond budget");
  return Distribution::grid(-half, dx, std::move(d));
}

}  // namespace

FixtureName fixture_name_from_string(const std::string& s) {
  if (s == "gaussian") return FixtureName::Gaussian;
  if (s == "laplace") return FixtureName::Laplace;
  if (s == "dirac_mixture") return FixtureName::DiracMixture;
  if (s == "spiked_laplace") return FixtureName::SpikedLaplace;
  if (s == "spiked_gaussian") return FixtureName::SpikedGaussian;
  if (s == "sawtooth_gaussian") return FixtureName::SawtoothGaussian;
  throw InvalidFixture("unknown fixture name: " + s);
}

std::string to_string(FixtureName name) {
  switch (name) {
    case FixtureName::Gaussian: return "gaussian";
    case FixtureName::Laplace: return "laplace";
    case FixtureName::DiracMixture: return "dirac_mixture";
    case FixtureName::SpikedLaplace: return "spiked_laplace";
    case FixtureName::SpikedGaussian: return "spiked_gaussian";
    case FixtureName::SawtoothGaussian: return "sawtooth_gaussian";
  }
  return "?";
}

Distribution make_fixture(const FixtureSpec& spec) {
  switch (spec.name) {
    case FixtureName::Gaussian:
      return Distribution::gaussian(spec.mean, spec.sigma);
    case FixtureName::Laplace:
      return Distribution::laplace(spec.scale);
    case FixtureName::DiracMixture: {
      if (!(spec.mass > 0.0 && spec.mass < 1.0))
        throw InvalidFixture("dirac_mixture: mass must be in (0,1)");
      return Distribution::mixture({MixtureComponent{1.0 - spec.mass, 0.0, 0.0},
                                    MixtureComponent{spec.mass, spec.loc, 0.0}});
    }
    case FixtureName::SpikedLaplace:
      return make_spiked_laplace(spec);
    case FixtureName::SpikedGaussian: {
      if (!(spec.mass > 0.0 && spec.mass < 1.0))
        throw InvalidFixture("spiked_gaussian: mass must be in (0,1)");
      if (!(spec.width >= 0.0)) throw InvalidFixture("spiked_gaussian: width must be >= 0");
      return Distribution::mixture({MixtureComponent{1.0 - spec.mass, spec.mean, spec.sigma},
                                    MixtureComponent{spec.mass, spec.loc, spec.width}});
    }
    case FixtureName::SawtoothGaussian:
      return make_sawtooth_gaussian(spec);
  }
  throw InvalidFixture("make_fixture: bad name");
}

std::vector<std::pair<std::string, Distribution>> standard_fixtures() {
  std::vector<std::pair<std::string, Distribution>> out;
  FixtureSpec s;
  s.name = FixtureName::Gaussian;
  out.emplace_back("gaussian", make_fixture(s));
  s.name = FixtureName::Laplace;
  out.emplace_back("laplace", make_fixture(s));
  s.name = FixtureName::DiracMixture;
  s.mass = 0.5;
  s.loc = 1.0;
  out.emplace_back("dirac_mixture", make_fixture(s));
  s = FixtureSpec{};
  s.name = FixtureName::SpikedLaplace;
  out.emplace_back("spiked_laplace", make_fixture(s));
  s = FixtureSpec{};
  s.name = FixtureName::SpikedGaussian;
  s.width = 0.0;
  out.emplace_back("spiked_gaussian", make_fixture(s));
  s = FixtureSpec{};
  s.name = FixtureName::SawtoothGaussian;
  out.emplace_back("sawtooth_gaussian", make_fixture(s));
  return out;
}

}  // namespace locest
