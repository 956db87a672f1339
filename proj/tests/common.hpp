#pragma once

#include <string>

#include "viscoflow/config.hpp"
#include "viscoflow/oracle.hpp"

namespace vft {

inline std::string config_path(const std::string& name) { return std::string(VF_SOURCE_DIR) + "/configs/" + name; }

inline vf::RunConfig reference_config() { return vf::load_config(config_path("reference.json")); }

inline vf::Material reference_material() { return reference_config().material; }

}  // namespace vft
