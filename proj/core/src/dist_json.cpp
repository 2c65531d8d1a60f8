#include "locest/dist_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "locest/errors.hpp"
#include "locest/fixtures.hpp"

namespace locest {

namespace {

using nlohmann::json;

double num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw InvalidDistribution(std::string("field must be numeric: ") + key);
  return j.at(key).get<double>();
}

Distribution parse_fixture(const json& j) {
  FixtureSpec s;
  s.name = fixture_name_from_string(j.at("name").get<std::string>());
  // Defaults chosen per fixture so the short specs work out of the box.
  if (s.name == FixtureName::DiracMixture) {
    s.mass = 0.5;
    s.loc = 1.0;
  }
  if (s.name == FixtureName::SpikedGaussian) s.width = 0.0;
  s.mean = num_or(j, "mu", s.mean);
  s.sigma = num_or(j, "sigma", s.sigma);
  s.scale = num_or(j, "scale", s.scale);
  s.mass = num_or(j, "mass", s.mass);
  s.loc = num_or(j, "loc", s.loc);
  s.width = num_or(j, "width", s.width);
  s.slope = num_or(j, "slope", s.slope);
  s.tooth_width = num_or(j, "tooth_width", s.tooth_width);
  s.region = num_or(j, "region", s.region);
  return make_fixture(s);
}

}  // namespace

Distribution distribution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw InvalidDistribution(std::string("bad distribution JSON: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "mixture") {
      std::vector<MixtureComponent> comps;
      for (const auto& c : j.at("components"))
        comps.push_back({c.at("w").get<double>(), c.at("mu").get<double>(),
                         c.at("sigma").get<double>()});
      return Distribution::mixture(std::move(comps));
    }
    if (type == "laplace") return Distribution::laplace(j.at("scale").get<double>());
    if (type == "grid") {
      std::vector<double> pdf = j.at("pdf").get<std::vector<double>>();
      return Distribution::grid(j.at("x0").get<double>(), j.at("dx").get<double>(), std::move(pdf));
    }
    if (type == "fixture") return parse_fixture(j);
    throw InvalidDistribution("unknown distribution type: " + type);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidDistribution(std::string("bad distribution spec: ") + e.what());
  }
}

Distribution distribution_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidDistribution("cannot open distribution spec: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return distribution_from_json(ss.str());
}

std::string distribution_to_json(const Distribution& d) {
  json j;
  switch (d.kind()) {
    case DistKind::Mixture: {
      j["type"] = "mixture";
      json comps = json::array();
      for (const auto& c : d.components())
        comps.push_back({{"w", c.weight}, {"mu", c.mean}, {"sigma", c.sigma}});
      j["components"] = comps;
      break;
    }
    case DistKind::Laplace:
      j["type"] = "laplace";
      j["scale"] = d.laplace_scale();
      break;
    case DistKind::Grid:
      j["type"] = "grid";
      j["x0"] = d.grid_x0();
      j["dx"] = d.grid_dx();
      j["pdf"] = d.grid_density();
      break;
  }
  return j.dump();
}

}  // namespace locest
