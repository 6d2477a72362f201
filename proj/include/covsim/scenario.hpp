#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "covsim/geometry.hpp"
#include "covsim/vehicle.hpp"

namespace covsim {

struct ScenarioParams {
    double w_max = 2000.0;  // m, side of the full square map
    int n_nfz = 20;
    int n_tz = 10;
    double nfz_side_min = 50.0;
    double nfz_side_max = 400.0;
    double tz_side_min = 100.0;
    double tz_side_max = 800.0;
    double aspect_max = 3.0;
    /// Clearance of the start position from the crop boundary and from NFZs.
    /// Defaults to the minimum-turn diameter 2 v T_b / pi for v = 20, T_b = 5.
    double start_margin = 200.0 / 3.141592653589793;
    /// Crops whose remaining target area is below this are redrawn (one FoV).
    double min_tz_area = 300.0 * 300.0;
};

struct Scenario {
    Rect map;
    RectSet nfzs;
    RectSet tzs;
    UavPose start_pose;
    double difficulty = 1.0;
    std::uint64_t seed = 0;

    bool operator==(const Scenario&) const = default;
};

/// Deterministic in (params, difficulty, seed).  Throws GenerationFailure
/// when no crop with enough target area and a valid start is found.
[[nodiscard]] Scenario generate(const ScenarioParams& params, double difficulty, std::uint64_t seed);

/// The target sub-pipeline: draw n_tz rects inside `bounds`, merge them into
/// an interior-disjoint union and remove the NFZs.
[[nodiscard]] RectSet generate_tzs(const ScenarioParams& params, const Rect& bounds, const RectSet& nfzs,
                                   std::uint64_t seed);

/// Parses a map file.  Throws ParseError (with line or field) on malformed
/// input and ValidationError when the scenario invariants do not hold.
[[nodiscard]] Scenario load_map(std::string_view text, const ScenarioParams& params = {});

[[nodiscard]] nlohmann::json scenario_to_map_json(const Scenario& s);

[[nodiscard]] Rect rect_from_json(const nlohmann::json& j, const std::string& field);
[[nodiscard]] nlohmann::json rect_to_json(const Rect& r);

}  // namespace covsim
