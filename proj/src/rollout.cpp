#include "covsim/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <numbers>
#include <chrono>
#include <memory>
#include <thread>

#include "covsim/errors.hpp"
#include "covsim/wire.hpp"

namespace covsim {

namespace {

constexpr std::uint64_t kPlannerStream = 0x504C414EULL;

nlohmann::json points_to_json(const std::vector<Vec2>& pts) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : pts) out.push_back({p.x, p.y});
    return out;
}

std::vector<Vec2> points_from_json(const nlohmann::json& j) {
    std::vector<Vec2> out;
    for (const auto& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return out;
}

nlohmann::json rects_to_json(const RectSet& s) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : s) out.push_back(rect_to_json(r));
    return out;
}

RectSet rects_from_json(const nlohmann::json& j, const std::string& field) {
    RectSet out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rect_from_json(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

UavPose pose_from_json(const nlohmann::json& j) {
    return UavPose{{j.at("pos").at(0).get<double>(), j.at("pos").at(1).get<double>()},
                   {j.at("dir").at(0).get<double>(), j.at("dir").at(1).get<double>()},
                   j.at("curvature").get<double>()};
}

}  // namespace

static std::unique_ptr<ActionPool> make_pool(const RolloutConfig& cfg) {
    if (cfg.planner != PlannerKind::greedy || cfg.sim.planner.pool_size <= 0) return nullptr;
    return std::make_unique<ActionPool>(cfg.sim.env_config(), cfg.sim.planner.pool_size);
}

RolloutResult run_rollout(const RolloutConfig& cfg) {
    const auto pool = make_pool(cfg);
    return run_rollout(cfg, pool.get());
}

RolloutResult run_rollout(const RolloutConfig& cfg, ActionPool* pool) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimConfig& sim = cfg.sim;
    const EnvConfig env_cfg = sim.env_config();

    Scenario scenario = cfg.map_text ? load_map(*cfg.map_text, sim.scenario_params())
                                     : generate(sim.scenario_params(), cfg.difficulty, cfg.seed);

    Environment env(env_cfg);
    env.reset(scenario);
    Rng rng = Rng::derive(cfg.seed, kPlannerStream);

    RolloutResult out;
    EpisodeReport& rep = out.report;
    rep.seed = cfg.seed;
    rep.difficulty = scenario.difficulty;
    rep.planner = std::string(to_string(cfg.planner));
    out.trace.scenario = scenario;
    out.trace.env = env_cfg;

    while (!env.done()) {
        ActionVec action;
        try {
            action = cfg.planner == PlannerKind::greedy
                         ? greedy_plan_step(env_cfg, env.state(), sim.planner, rng, pool)
                         : sample_feasible_action(env_cfg, env.state(), rng, sim.planner.max_tries);
        } catch (const SamplingExhausted&) {
            rep.truncated_reason = "exhausted";
            break;
        }
        StepResult r = env.step(action);
        out.trace.steps.push_back(TraceStep{action, r.info.verdict, r.reward, env.state().pose,
                                            r.info.coverage_remaining, std::move(r.path),
                                            std::move(r.frame_positions)});
    }

    const EnvState& st = env.state();
    if (st.truncated) {
        rep.truncated_reason = st.consecutive_violations >= env_cfg.max_violations ? "violations" : "max_steps";
    }
    rep.steps = st.step_index;
    rep.success = st.terminated;
    rep.total_energy_j = st.cumulative_energy;
    rep.coverage_fraction = st.terminated ? 1.0 : 1.0 - st.tzs.area() / scenario.tzs.area();
    rep.violation_count = st.total_violations;
    out.trace.final_tzs = st.tzs;
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<EpisodeReport> run_eval(const RolloutConfig& base, int episodes, int jobs) {
    if (episodes < 0) throw ContractViolation("episodes must be >= 0");
    std::vector<EpisodeReport> reports(static_cast<std::size_t>(episodes));
    std::vector<std::exception_ptr> errors(reports.size());
    std::atomic<int> next{0};
    const auto shared_pool = make_pool(base);
    const auto worker = [&] {
        for (int i = next++; i < episodes; i = next++) {
            RolloutConfig cfg = base;
            cfg.seed = base.seed + static_cast<std::uint64_t>(i);
            try {
                reports[static_cast<std::size_t>(i)] = run_rollout(cfg, shared_pool.get()).report;
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int n_threads = std::clamp(jobs, 1, std::max(1, episodes));
    std::vector<std::jthread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return reports;
}

nlohmann::json report_to_json(const EpisodeReport& r, bool include_wall_time) {
    nlohmann::json j = {
        {"seed", r.seed},
        {"difficulty", r.difficulty},
        {"planner", r.planner},
        {"steps", r.steps},
        {"success", r.success},
        {"truncated_reason", r.truncated_reason},
        {"total_energy_j", r.total_energy_j},
        {"coverage_fraction", r.coverage_fraction},
        {"violation_count", r.violation_count},
    };
    if (include_wall_time) j["wall_time_s"] = r.wall_time_s;
    return j;
}

EpisodeReport report_from_json(const nlohmann::json& j) {
    EpisodeReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.difficulty = j.at("difficulty").get<double>();
    r.planner = j.at("planner").get<std::string>();
    r.steps = j.at("steps").get<int>();
    r.success = j.at("success").get<bool>();
    r.truncated_reason = j.at("truncated_reason").get<std::string>();
    r.total_energy_j = j.at("total_energy_j").get<double>();
    r.coverage_fraction = j.at("coverage_fraction").get<double>();
    r.violation_count = j.at("violation_count").get<int>();
    r.wall_time_s = j.value("wall_time_s", 0.0);
    return r;
}

nlohmann::json eval_to_json(const std::vector<EpisodeReport>& reports, bool include_wall_time) {
    int successes = 0;
    int violations = 0;
    double energy = 0.0;
    nlohmann::json episodes = nlohmann::json::array();
    for (const auto& r : reports) {
        successes += r.success ? 1 : 0;
        violations += r.violation_count;
        energy += r.total_energy_j;
        episodes.push_back(report_to_json(r, include_wall_time));
    }
    const double n = reports.empty() ? 1.0 : static_cast<double>(reports.size());
    return {
        {"planner", reports.empty() ? "" : reports.front().planner},
        {"episodes", reports.size()},
        {"difficulty", reports.empty() ? 0.0 : reports.front().difficulty},
        {"successes", successes},
        {"success_rate", successes / n},
        {"violation_count", violations},
        {"mean_energy_j", energy / n},
        {"reports", std::move(episodes)},
    };
}

nlohmann::json trace_to_json(const Trace& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) {
        steps.push_back({
            {"action", s.action},
            {"verdict", std::string(to_string(s.verdict))},
            {"reward", s.reward},
            {"pose", pose_to_json(s.pose)},
            {"coverage_remaining", s.coverage_remaining},
            {"path", points_to_json(s.path)},
            {"frames", points_to_json(s.frames)},
        });
    }
    return {
        {"scenario", scenario_to_map_json(t.scenario)},
        {"start_pose", pose_to_json(t.scenario.start_pose)},
        {"fov_side", t.env.camera.fov_side()},
        {"steps", std::move(steps)},
        {"final_tzs", rects_to_json(t.final_tzs)},
    };
}

Trace trace_from_json(const nlohmann::json& j) {
    try {
        Trace t;
        const auto& sc = j.at("scenario");
        t.scenario.map = rect_from_json(sc.at("map"), "scenario.map");
        t.scenario.nfzs = rects_from_json(sc.at("nfzs"), "scenario.nfzs");
        t.scenario.tzs = rects_from_json(sc.at("tzs"), "scenario.tzs");
        t.scenario.seed = sc.value("seed", std::uint64_t{0});
        t.scenario.difficulty = sc.value("difficulty", 1.0);
        t.scenario.start_pose = pose_from_json(j.at("start_pose"));
        const double side = j.at("fov_side").get<double>();
        t.env.camera.altitude = 0.5 * side;
        t.env.camera.view_angle = std::numbers::pi / 2.0;
        for (const auto& s : j.at("steps")) {
            TraceStep step;
            for (std::size_t i = 0; i < step.action.size(); ++i) step.action[i] = s.at("action").at(i).get<double>();
            step.verdict = verdict_from_string(s.at("verdict").get<std::string>()).value_or(FeasibilityVerdict::feasible);
            step.reward = s.at("reward").get<double>();
            step.pose = pose_from_json(s.at("pose"));
            step.coverage_remaining = s.at("coverage_remaining").get<double>();
            step.path = points_from_json(s.at("path"));
            step.frames = points_from_json(s.at("frames"));
            t.steps.push_back(std::move(step));
        }
        t.final_tzs = rects_from_json(j.at("final_tzs"), "final_tzs");
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("trace: ") + e.what());
    }
}

}  // namespace covsim
