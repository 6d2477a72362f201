#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "covsim/curriculum.hpp"
#include "covsim/environment.hpp"
#include "covsim/planners.hpp"
#include "covsim/scenario.hpp"

namespace covsim {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "COVERAGE_SIM_CONFIG";

/// Every tunable of the simulator in one place.  Scenario margins that
/// depend on the UAV (start clearance, minimum target area) follow the UAV
/// parameters unless set explicitly.
struct SimConfig {
    EnvConfig env;
    ScenarioParams world;
    CurriculumState curriculum;
    GreedyOptions planner;
    std::optional<double> start_margin_override;
    std::optional<double> min_tz_area_override;
    std::optional<int> n_nfz_obs_override;

    /// World parameters with derived margins filled in.
    [[nodiscard]] ScenarioParams scenario_params() const;
    /// Environment parameters with observation size and scale tied to the world.
    [[nodiscard]] EnvConfig env_config() const;
    void validate() const;
};

/// Applies the keys present in `j` on top of `base`.  Unknown sections or
/// keys are a ParseError so typos do not pass silently.
[[nodiscard]] SimConfig apply_config_json(SimConfig base, const nlohmann::json& j);

/// Reads `path`; or, when empty, the file named by COVERAGE_SIM_CONFIG if
/// set; otherwise returns defaults.
[[nodiscard]] SimConfig load_config(const std::string& path = {});

[[nodiscard]] nlohmann::json config_to_json(const SimConfig& cfg);

[[nodiscard]] std::string read_text_file(const std::string& path);

}  // namespace covsim
