#pragma once

#include <map>
#include <string>
#include <vector>

#include "cdde/model.hpp"

namespace cdde {

using ParamMap = std::map<std::string, double>;

std::vector<std::string> preset_names();

/// Documented default parameter set for a named preset. The source models
/// give no numeric values; these defaults satisfy the stated feasibility
/// conditions (knauer: a2 < a1, 2*a1 > 1) and are pinned by tests.
ParamMap preset_defaults(const std::string& name);

/// Build a named model with the defaults overridden by `overrides`.
/// Unknown parameter names are rejected.
CyclicModel make_preset(const std::string& name, const ParamMap& overrides = {});

} // namespace cdde
