#pragma once

#include <json.hpp>

#include "covsim/environment.hpp"

namespace covsim {

// JSON encodings shared by the stdio protocol, traces and reports.
//
//   observation: {"scalars":[8], "nfzs":[[13]...], "nfz_mask":[bool...],
//                 "zones":[{"descriptor":[15], "rects":[[5]...]}...]}
//   step:        {"obs":..., "reward":r, "terminated":b, "truncated":b,
//                 "info":{"verdict":s, "coverage_remaining":m2, "energy_j":J,
//                         "frames_applied":n}}
//
// Doubles are written in shortest round-trip form, so parsing a message
// reproduces every number bit for bit.

[[nodiscard]] nlohmann::json observation_to_json(const Observation& obs);
/// Throws ParseError on shape mismatches.
[[nodiscard]] Observation observation_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json step_to_json(const StepResult& r);

[[nodiscard]] nlohmann::json pose_to_json(const UavPose& p);

}  // namespace covsim
