#pragma once

#include <json.hpp>

#include "calocal/config.hpp"

namespace calocal::detail {

nlohmann::ordered_json config_json(const RunConfig& c);

}  // namespace calocal::detail
