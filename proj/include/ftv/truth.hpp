#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ftv/grid.hpp"

namespace ftv {

/// A generated test function with its numerically certified BV_L membership.
struct Truth {
    std::string name;
    TorusSignal signal;
    double sup = 0.0;
    double bv = 0.0;  // anisotropic
    double bound = 0.0;  // declared L: sup <= L and bv <= L
};

/// Names: constant, step1d, ramp1d, step_ramp1d, blocks1d, disc2d, square2d,
/// cartoon2d, random_cartoon2d. Unknown names or parameter keys throw.
Truth truth_library(const std::string& name, int dim, int side, const nlohmann::json& params = nlohmann::json::object());

std::vector<std::string> truth_names();

} // namespace ftv
