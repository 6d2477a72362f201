#include "covsim/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "covsim/errors.hpp"

namespace covsim {

double EnvConfig::kappa_max() const noexcept {
    return kappa_max_override ? *kappa_max_override : max_curvature_limit(power);
}

FeasibilityConfig EnvConfig::resolved_feasibility() const noexcept {
    FeasibilityConfig f = feasibility;
    f.kappa_max = kappa_max();
    return f;
}

double EnvConfig::reference_energy() const { return covsim::power(power.phi_max, power) * segment_time; }

void EnvConfig::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string("config: ") + what);
    };
    require(power.A > 0.0 && power.B > 0.0 && power.v_const > 0.0, "A, B and v_const must be positive");
    require(power.phi_max >= 0.0 && power.phi_max < std::numbers::pi / 2.0, "phi_max must lie in [0, pi/2)");
    require(power.g > 0.0, "g must be positive");
    require(camera.altitude > 0.0 && camera.view_angle > 0.0 && camera.view_angle < std::numbers::pi,
            "camera altitude and view angle must be positive (angle < pi)");
    require(camera.frame_period > 0.0, "frame period must be positive");
    require(segment_time > 0.0 && dt > 0.0 && dt <= segment_time, "need 0 < dt <= segment_time");
    require(lambda > 0.0, "lambda must be positive");
    require(feasibility.n_check_points >= 2, "n_check_points must be >= 2");
    require(feasibility.length_min_factor > 0.0 && feasibility.length_min_factor <= feasibility.length_max_factor,
            "length factors must satisfy 0 < min <= max");
    require(kappa_max() >= 0.0, "kappa_max must be non-negative");
    require(max_violations >= 1 && max_steps >= 1, "max_violations and max_steps must be >= 1");
    require(n_nfz_obs >= 0 && w_max > 0.0, "n_nfz_obs >= 0 and w_max > 0");
}

SegmentOutcome simulate_segment(const EnvConfig& cfg, const Scenario& scenario, const UavPose& pose,
                                const RectSet& tzs, double frame_phase, const ActionVec& action) {
    SegmentOutcome out;
    out.curve = action_to_curve(pose, action, cfg.lambda);
    out.verdict = check_curve(scenario.map, scenario.nfzs, out.curve, cfg.resolved_feasibility(),
                              cfg.power.v_const, cfg.segment_time);
    if (out.verdict != FeasibilityVerdict::feasible) return out;

    constexpr double kTimeTol = 1e-9;
    const double period = cfg.camera.frame_period;
    std::vector<double> frame_times;
    const double first = period - frame_phase;
    for (int j = 0;; ++j) {
        const double s = first + j * period;
        if (s > cfg.segment_time + kTimeTol) break;
        frame_times.push_back(std::min(s, cfg.segment_time));
    }

    Traversal trav;
    try {
        trav = traverse_constant_speed(out.curve, cfg.power.v_const, cfg.segment_time, cfg.dt, frame_times);
    } catch (const ParameterOverflowError& e) {
        throw InternalError(std::string("feasible segment overflowed its parameter range: ") + e.what());
    }

    out.tzs_after = tzs;
    for (const auto& sample : trav.at_times) {
        out.frame_positions.push_back(sample.position);
        out.tzs_after = rect_set_subtract(out.tzs_after, fov_rect(sample.position, cfg.camera));
    }
    if (frame_times.empty()) {
        out.frame_phase_after = frame_phase + cfg.segment_time;
    } else {
        out.frame_phase_after = cfg.segment_time - frame_times.back();
        if (out.frame_phase_after < kTimeTol) out.frame_phase_after = 0.0;
    }

    out.energy = segment_energy(trav.dense, cfg.power);
    out.end_pose = UavPose{trav.final.position, trav.final.direction, trav.final.curvature};

    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(0.1 / cfg.dt)));
    for (std::size_t i = 0; i < trav.dense.size(); i += stride) out.path.push_back(trav.dense[i].position);
    if ((trav.dense.size() - 1) % stride != 0) out.path.push_back(trav.dense.back().position);
    return out;
}

namespace {

void put(double* dst, Vec2 v, double scale) {
    dst[0] = v.x / scale;
    dst[1] = v.y / scale;
}

}  // namespace

Observation observe(const EnvConfig& cfg, const EnvState& state) {
    const double w = cfg.w_max;
    const double w2 = w * w;
    const Rect& map = state.scenario.map;
    const Vec2 map_tl = map.top_left();
    const Vec2 map_br = map.bottom_right();
    const Vec2 uav = state.pose.position;
    const double kmax = cfg.kappa_max();

    Observation obs;
    auto& s = obs.scalars;
    put(&s[0], uav - map_tl, w);
    s[2] = state.pose.direction.x;
    s[3] = state.pose.direction.y;
    s[4] = kmax > 0.0 ? state.pose.curvature / kmax : 0.0;
    s[5] = map.width() / w;
    s[6] = map.height() / w;
    s[7] = state.frame_phase / cfg.camera.frame_period;

    const std::size_t n_rows = std::max(static_cast<std::size_t>(cfg.n_nfz_obs), state.scenario.nfzs.size());
    obs.nfz_matrix.assign(n_rows, {});
    obs.nfz_mask.assign(n_rows, false);
    for (std::size_t i = 0; i < state.scenario.nfzs.size(); ++i) {
        const Rect& r = state.scenario.nfzs[i];
        auto& row = obs.nfz_matrix[i];
        const Vec2 tl = r.top_left();
        const Vec2 br = r.bottom_right();
        put(&row[0], tl - map_tl, w);
        put(&row[2], tl - map_br, w);
        put(&row[4], tl - uav, w);
        put(&row[6], br - map_tl, w);
        put(&row[8], br - map_br, w);
        put(&row[10], br - uav, w);
        row[12] = r.area() / w2;
        obs.nfz_mask[i] = true;
    }

    for (const auto& zone : group_zones(state.tzs)) {
        ZoneObservation zo;
        auto& d = zo.descriptor;
        const Vec2 c = zone.centroid;
        put(&d[0], c - map_tl, w);
        put(&d[2], c - map_br, w);
        put(&d[4], c - uav, w);
        put(&d[6], zone.bbox.top_left() - map_tl, w);
        put(&d[8], zone.bbox.top_left() - map_br, w);
        put(&d[10], zone.bbox.bottom_right() - map_tl, w);
        put(&d[12], zone.bbox.bottom_right() - map_br, w);
        d[14] = zone.area / w2;
        zo.rects.reserve(zone.rects.size());
        for (const auto& r : zone.rects) {
            std::array<double, 5> row{};
            put(&row[0], r.top_left() - c, w);
            put(&row[2], r.bottom_right() - c, w);
            row[4] = r.area() / w2;
            zo.rects.push_back(row);
        }
        obs.zones.push_back(std::move(zo));
    }
    return obs;
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Observation Environment::reset(const Scenario& scenario) {
    state_ = EnvState{};
    state_.scenario = scenario;
    state_.pose = scenario.start_pose;
    state_.tzs = scenario.tzs;
    if (cfg_.frame_at_reset) state_.tzs = rect_set_subtract(state_.tzs, fov_rect(state_.pose.position, cfg_.camera));
    state_.terminated = state_.tzs.empty();
    started_ = true;
    return observe();
}

StepResult Environment::step(const ActionVec& action) {
    if (!started_) throw ContractViolation("step() called before reset()");
    if (done()) throw ContractViolation("step() called on a finished episode");
    if (!action_in_range(action)) throw ContractViolation("action components must lie in [-1, 1]");

    StepResult result;
    SegmentOutcome seg =
        simulate_segment(cfg_, state_.scenario, state_.pose, state_.tzs, state_.frame_phase, action);
    result.info.verdict = seg.verdict;
    ++state_.step_index;

    if (seg.verdict != FeasibilityVerdict::feasible) {
        ++state_.consecutive_violations;
        ++state_.total_violations;
        result.reward = -1.0;
        state_.truncated =
            state_.consecutive_violations >= cfg_.max_violations || state_.step_index >= cfg_.max_steps;
    } else {
        state_.pose = seg.end_pose;
        state_.tzs = std::move(seg.tzs_after);
        state_.frame_phase = seg.frame_phase_after;
        state_.t += cfg_.segment_time;
        state_.consecutive_violations = 0;
        state_.cumulative_energy += seg.energy;
        state_.terminated = state_.tzs.empty();
        state_.truncated = !state_.terminated && state_.step_index >= cfg_.max_steps;

        result.reward = -seg.energy / cfg_.reference_energy();
        if (state_.terminated) result.reward += cfg_.terminal_reward;
        result.info.energy = seg.energy;
        result.info.frames_applied = static_cast<int>(seg.frame_positions.size());
        result.path = std::move(seg.path);
        result.frame_positions = std::move(seg.frame_positions);
    }

    result.terminated = state_.terminated;
    result.truncated = state_.truncated;
    result.info.coverage_remaining = state_.tzs.area();
    result.observation = observe();
    return result;
}

}  // namespace covsim
