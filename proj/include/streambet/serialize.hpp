#pragma once

#include <json.hpp>

#include "streambet/calibration.hpp"
#include "streambet/detector.hpp"
#include "streambet/permutation.hpp"

namespace streambet {

nlohmann::json outcome_to_json(const TestOutcome& outcome);
nlohmann::json baseline_to_json(const BaselineOutcome& outcome);
nlohmann::json calibration_to_json(const CalibrationResult& result);

}  // namespace streambet
