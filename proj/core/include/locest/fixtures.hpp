#pragma once

#include <string>
#include <vector>

#include "locest/distribution.hpp"

namespace locest {

enum class FixtureName {
  Gaussian,
  Laplace,
  DiracMixture,
  SpikedLaplace,
  SpikedGaussian,
  SawtoothGaussian,
};

/// Parameters for the named benchmark distributions. Only the fields
/// relevant to the chosen fixture are read.
struct FixtureSpec {
  FixtureName name = FixtureName::Gaussian;

  double mean = 0.0;   // gaussian
  double sigma = 1.0;  // gaussian
  double scale = 1.0;  // laplace body

  double mass = 0.001;  // spike weight, in (0,1); 0 degenerates to the body
  double loc = 4.0;     // spike location (dirac_mixture second atom too)
  double width = 0.002; // spike std dev; 0 means a point mass

  double slope = 2.0;        // sawtooth slope magnitude
  double tooth_width = 0.05; // width of each tooth
  double region = 1.0;       // half-width of the perturbed region
};

FixtureName fixture_name_from_string(const std::string& s);
std::string to_string(FixtureName name);

Distribution make_fixture(const FixtureSpec& spec);

/// The six benchmark fixtures with default parameters, used by the
/// invariant and acceptance batteries.
std::vector<std::pair<std::string, Distribution>> standard_fixtures();

}  // namespace locest
