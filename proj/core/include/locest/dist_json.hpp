#pragma once

#include <string>

#include "locest/distribution.hpp"

namespace locest {

/// Parses the JSON distribution spec:
///   {"type":"mixture","components":[{"w":0.999,"mu":0,"sigma":1}, ...]}
///   {"type":"laplace","scale":1}
///   {"type":"grid","x0":-10,"dx":0.001,"pdf":[...]}
///   {"type":"fixture","name":"spiked_laplace","mass":0.001,"loc":4,"width":0.002}
Distribution distribution_from_json(const std::string& text);

Distribution distribution_from_json_file(const std::string& path);

std::string distribution_to_json(const Distribution& d);

}  // namespace locest
