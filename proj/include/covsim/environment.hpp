#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "covsim/feasibility.hpp"
#include "covsim/geometry.hpp"
#include "covsim/scenario.hpp"
#include "covsim/vehicle.hpp"

namespace covsim {

struct EnvConfig {
    PowerModel power;
    CameraModel camera;
    double segment_time = 5.0;  // T_b, seconds per Bézier segment
    double dt = 0.01;           // integrator step
    // m, action scaling. At 100 m almost no random action passes the
    // curvature check; acceptance peaks near 240 m.
    double lambda = 240.0;
    FeasibilityConfig feasibility;
    /// When unset, kappa_max follows the power model's bank limit.
    std::optional<double> kappa_max_override;
    double terminal_reward = 10.0;
    int max_violations = 5;
    int max_steps = 1000;
    int n_nfz_obs = 20;    // NFZ rows in the observation (zero-padded)
    double w_max = 2000.0;  // normalization length
    bool frame_at_reset = true;

    [[nodiscard]] double kappa_max() const noexcept;
    /// feasibility with kappa_max filled in.
    [[nodiscard]] FeasibilityConfig resolved_feasibility() const noexcept;
    /// Energy of one segment flown at the bank limit; the reward unit.
    [[nodiscard]] double reference_energy() const;
    /// Throws ValidationError on out-of-range parameters.
    void validate() const;
};

struct EnvState {
    Scenario scenario;
    UavPose pose;
    RectSet tzs;
    double t = 0.0;
    double frame_phase = 0.0;  // seconds since the last camera frame
    int consecutive_violations = 0;
    int total_violations = 0;
    double cumulative_energy = 0.0;
    int step_index = 0;
    bool terminated = false;
    bool truncated = false;

    bool operator==(const EnvState&) const = default;
};

struct ZoneObservation {
    std::array<double, 15> descriptor{};
    std::vector<std::array<double, 5>> rects;

    bool operator==(const ZoneObservation&) const = default;
};

struct Observation {
    std::array<double, 8> scalars{};
    std::vector<std::array<double, 13>> nfz_matrix;
    std::vector<bool> nfz_mask;  // false for zero-filled padding rows
    std::vector<ZoneObservation> zones;

    bool operator==(const Observation&) const = default;
};

struct StepInfo {
    FeasibilityVerdict verdict = FeasibilityVerdict::feasible;
    double coverage_remaining = 0.0;  // m^2
    double energy = 0.0;              // J, this step
    int frames_applied = 0;
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
    StepInfo info;
    /// Flown path (every 0.1 s) and camera positions; empty after a violation.
    std::vector<Vec2> path;
    std::vector<Vec2> frame_positions;
};

/// What flying one action from a given state would do, without committing.
struct SegmentOutcome {
    FeasibilityVerdict verdict = FeasibilityVerdict::feasible;
    BezierCurve curve;
    UavPose end_pose;
    RectSet tzs_after;
    double energy = 0.0;
    double frame_phase_after = 0.0;
    std::vector<Vec2> frame_positions;
    std::vector<Vec2> path;
};

[[nodiscard]] SegmentOutcome simulate_segment(const EnvConfig& cfg, const Scenario& scenario, const UavPose& pose,
                                              const RectSet& tzs, double frame_phase, const ActionVec& action);

[[nodiscard]] Observation observe(const EnvConfig& cfg, const EnvState& state);

/// Episodic coverage environment.  Single-threaded; distinct instances are
/// independent.
class Environment {
public:
    explicit Environment(EnvConfig cfg = {});

    Observation reset(const Scenario& scenario);
    /// Throws ContractViolation when no episode is running or the action is
    /// outside [-1,1]^6.
    StepResult step(const ActionVec& action);

    [[nodiscard]] Observation observe() const { return covsim::observe(cfg_, state_); }
    [[nodiscard]] const EnvState& state() const noexcept { return state_; }
    [[nodiscard]] const EnvConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] bool started() const noexcept { return started_; }
    [[nodiscard]] bool done() const noexcept { return state_.terminated || state_.truncated; }

private:
    EnvConfig cfg_;
    EnvState state_;
    bool started_ = false;
};

}  // namespace covsim
