#include "streambet/serialize.hpp"

namespace streambet {

namespace {

const char* to_string(ViolationKind k) {
  return k == ViolationKind::bound_exceeded ? "bound_exceeded"
                                            : "factor_nonpositive";
}

}  // namespace

nlohmann::json outcome_to_json(const TestOutcome& outcome) {
  nlohmann::json j;
  j["decision"] = to_string(outcome.decision);
  j["rejection_time"] = outcome.rejection_time;
  j["mode"] = to_string(outcome.mode);
  j["steps_consumed"] = outcome.steps_consumed;
  nlohmann::json trajectory = nlohmann::json::array();
  for (std::size_t i = 0; i < outcome.wealth_a.size(); ++i) {
    nlohmann::json point;
    point["t"] = static_cast<long>(i + 1);
    if (outcome.mode == DetectorMode::simple) {
      point["wealth"] = outcome.wealth_a[i];
    } else {
      point["wealth_a"] = outcome.wealth_a[i];
      point["wealth_b"] = outcome.wealth_b[i];
    }
    trajectory.push_back(point);
  }
  j["wealth_trajectory"] = trajectory;
  nlohmann::json violations = nlohmann::json::array();
  for (const Violation& v : outcome.violations) {
    violations.push_back({{"step", v.step}, {"kind", to_string(v.kind)}});
  }
  j["violations"] = violations;
  if (outcome.finalize_z) {
    j["finalize_z"] = *outcome.finalize_z;
  } else {
    j["finalize_z"] = nullptr;
  }
  if (outcome.estimated_d) {
    j["estimated_d"] = *outcome.estimated_d;
  } else {
    j["estimated_d"] = nullptr;
  }
  return j;
}

nlohmann::json baseline_to_json(const BaselineOutcome& outcome) {
  nlohmann::json j;
  j["decision"] = to_string(outcome.decision);
  j["rejection_time"] = outcome.rejection_time;
  nlohmann::json batches = nlohmann::json::array();
  for (const BatchRecord& b : outcome.batches) {
    nlohmann::json rec;
    rec["index"] = b.index;
    rec["delta_obs"] = b.delta_obs;
    rec["gate_open"] = b.gate_open;
    rec["threshold"] = b.threshold;
    if (b.gate_open) {
      rec["p_value"] = b.p_value;
    } else {
      rec["p_value"] = nullptr;
    }
    rec["rejected"] = b.rejected;
    batches.push_back(rec);
  }
  j["batches"] = batches;
  return j;
}

nlohmann::json calibration_to_json(const CalibrationResult& result) {
  nlohmann::json j;
  j["epsilon"] = result.epsilon;
  j["d"] = result.d;
  j["provenance"] =
      result.provenance == Provenance::oracle ? "oracle" : "estimated";
  j["samples_consumed"] = result.samples_consumed;
  return j;
}

}  // namespace streambet
