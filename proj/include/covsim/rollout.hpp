#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "covsim/config.hpp"
#include "covsim/planners.hpp"

namespace covsim {

struct EpisodeReport {
    std::uint64_t seed = 0;
    double difficulty = 0.0;
    std::string planner;
    int steps = 0;
    bool success = false;
    std::string truncated_reason = "none";  // none | violations | max_steps | exhausted
    double total_energy_j = 0.0;
    double coverage_fraction = 0.0;
    int violation_count = 0;
    double wall_time_s = 0.0;
};

struct TraceStep {
    ActionVec action{};
    FeasibilityVerdict verdict = FeasibilityVerdict::feasible;
    double reward = 0.0;
    UavPose pose;  // after the step
    double coverage_remaining = 0.0;
    std::vector<Vec2> path;
    std::vector<Vec2> frames;
};

struct Trace {
    Scenario scenario;
    EnvConfig env;  // only camera/map geometry is needed to render
    std::vector<TraceStep> steps;
    RectSet final_tzs;
};

struct RolloutConfig {
    SimConfig sim;
    PlannerKind planner = PlannerKind::greedy;
    std::uint64_t seed = 0;
    double difficulty = 0.1;
    /// Contents of a map file; when set, seed/difficulty only drive the planner.
    std::optional<std::string> map_text;
};

struct RolloutResult {
    EpisodeReport report;
    Trace trace;
};

/// Runs one episode with a scripted planner.  Scenario and planner errors
/// propagate as exceptions.
[[nodiscard]] RolloutResult run_rollout(const RolloutConfig& cfg);
/// As above with a caller-owned action pool, which must have been built for
/// the same environment config.  Null means uniform greedy proposals.
[[nodiscard]] RolloutResult run_rollout(const RolloutConfig& cfg, ActionPool* pool);

/// Runs `episodes` rollouts with seeds first_seed, first_seed + 1, ... on up
/// to `jobs` threads.  Reports come back in seed order regardless of jobs.
[[nodiscard]] std::vector<EpisodeReport> run_eval(const RolloutConfig& base, int episodes, int jobs = 1);

/// wall_time_s is omitted when include_wall_time is false, which makes the
/// document a pure function of the inputs.
[[nodiscard]] nlohmann::json report_to_json(const EpisodeReport& r, bool include_wall_time = true);
[[nodiscard]] EpisodeReport report_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json eval_to_json(const std::vector<EpisodeReport>& reports, bool include_wall_time = true);

[[nodiscard]] nlohmann::json trace_to_json(const Trace& t);
[[nodiscard]] Trace trace_from_json(const nlohmann::json& j);

}  // namespace covsim
