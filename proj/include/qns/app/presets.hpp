#pragma once

#include <string>
#include <vector>

#include "qns/app/config.hpp"

namespace qns::app {

/// Built-in experiment configurations: dpss, fig1, fig2, fig3, fig4e, fig4f.
std::vector<std::string> preset_names();

/// Throws a Validation error for an unknown name.
Json preset(const std::string& name);

}  // namespace qns::app
