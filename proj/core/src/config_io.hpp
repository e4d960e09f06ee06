#pragma once

#include <nlohmann/json.hpp>

#include "obo/runner.hpp"

namespace obo {

nlohmann::json config_json(const ExperimentConfig& cfg);

}  // namespace obo
