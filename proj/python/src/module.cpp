#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "covsim/config.hpp"
#include "covsim/errors.hpp"
#include "covsim/planners.hpp"
#include "covsim/rollout.hpp"
#include "covsim/server.hpp"
#include "covsim/svg.hpp"
#include "covsim/wire.hpp"

namespace py = pybind11;
using namespace covsim;

namespace {

// Structured values cross the boundary as JSON text; the Python side
// wraps them with json.loads / json.dumps.
SimConfig config_from(const std::optional<std::string>& text) {
    if (!text || text->empty()) return SimConfig{};
    return apply_config_json(SimConfig{}, nlohmann::json::parse(*text));
}

py::array_t<double> rows(const auto& matrix, std::size_t width) {
    py::array_t<double> out({matrix.size(), width});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < matrix.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) m(i, j) = matrix[i][j];
    return out;
}

py::dict observation_dict(const Observation& o) {
    py::dict d;
    d["scalars"] = py::array_t<double>(o.scalars.size(), o.scalars.data());
    d["nfzs"] = rows(o.nfz_matrix, 13);
    py::array_t<bool> mask(o.nfz_mask.size());
    for (std::size_t i = 0; i < o.nfz_mask.size(); ++i) mask.mutable_at(i) = o.nfz_mask[i];
    d["nfz_mask"] = mask;
    py::list zones;
    for (const auto& z : o.zones) {
        py::dict zd;
        zd["descriptor"] = py::array_t<double>(z.descriptor.size(), z.descriptor.data());
        zd["rects"] = rows(z.rects, 5);
        zones.append(zd);
    }
    d["zones"] = zones;
    return d;
}

UavPose pose_from(const std::array<double, 2>& pos, double heading, double kappa) {
    return {{pos[0], pos[1]}, {std::cos(heading), std::sin(heading)}, kappa};
}

class PyEnv {
public:
    explicit PyEnv(const std::optional<std::string>& config)
        : sim_(config_from(config)), env_(sim_.env_config()) {}

    py::dict reset(std::uint64_t seed, double difficulty) {
        return observation_dict(env_.reset(generate(sim_.scenario_params(), difficulty, seed)));
    }
    py::dict reset_map(const std::string& text) {
        return observation_dict(env_.reset(load_map(text, sim_.scenario_params())));
    }

    py::tuple step(const ActionVec& action) {
        StepResult r = env_.step(action);
        py::dict info;
        info["verdict"] = std::string(to_string(r.info.verdict));
        info["coverage_remaining"] = r.info.coverage_remaining;
        info["energy_j"] = r.info.energy;
        info["frames_applied"] = r.info.frames_applied;
        return py::make_tuple(observation_dict(r.observation), r.reward, r.terminated, r.truncated, info);
    }

    /// Same bytes the stdio server would send for this step.
    std::string step_json(const ActionVec& action) { return step_to_json(env_.step(action)).dump(); }

    py::dict pose() const {
        const UavPose& p = env_.state().pose;
        py::dict d;
        d["position"] = py::make_tuple(p.position.x, p.position.y);
        d["direction"] = py::make_tuple(p.direction.x, p.direction.y);
        d["curvature"] = p.curvature;
        return d;
    }

    double coverage_remaining() const { return env_.state().tzs.area(); }
    bool done() const { return env_.done(); }
    int step_index() const { return env_.state().step_index; }
    std::string scenario_json() const { return scenario_to_map_json(env_.state().scenario).dump(); }

    ActionVec sample_feasible_action(std::uint64_t seed, int max_tries) const {
        Rng rng(seed);
        return covsim::sample_feasible_action(env_.config(), env_.state(), rng, max_tries);
    }

    ActionVec greedy_action(std::uint64_t seed) {
        if (!pool_) pool_ = std::make_unique<ActionPool>(env_.config(), std::max(1, sim_.planner.pool_size));
        Rng rng(seed);
        return greedy_plan_step(env_.config(), env_.state(), sim_.planner, rng,
                                sim_.planner.pool_size > 0 ? pool_.get() : nullptr);
    }

private:
    SimConfig sim_;
    Environment env_;
    std::unique_ptr<ActionPool> pool_;
};

class PySession {
public:
    explicit PySession(const std::optional<std::string>& config) : session_(config_from(config)) {}
    std::string handle(const std::string& line) { return session_.handle(line).dump(); }
    bool finished() const { return session_.finished(); }

private:
    ProtocolSession session_;
};

RolloutConfig rollout_config(const std::string& planner, std::uint64_t seed, double difficulty,
                             const std::optional<std::string>& map_text, const std::optional<std::string>& config) {
    RolloutConfig rc;
    rc.sim = config_from(config);
    const auto p = planner_from_string(planner);
    if (!p) throw ContractViolation("planner must be \"random\" or \"greedy\"");
    rc.planner = *p;
    rc.seed = seed;
    rc.difficulty = difficulty;
    rc.map_text = map_text;
    return rc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Continuous-world UAV coverage simulator (C++ core)";

    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<GenerationFailure>(m, "GenerationFailure", PyExc_RuntimeError);
    py::register_exception<SamplingExhausted>(m, "SamplingExhausted", PyExc_RuntimeError);

    m.def("power", [](double phi, const std::optional<std::string>& config) {
        return covsim::power(phi, config_from(config).env.power);
    }, py::arg("phi"), py::arg("config") = py::none(), "Power in W at roll angle phi (rad).");
    m.def("fov_side", [](const std::optional<std::string>& config) {
        return config_from(config).env.camera.fov_side();
    }, py::arg("config") = py::none());
    m.def("kappa_max", [](const std::optional<std::string>& config) {
        return config_from(config).env_config().kappa_max();
    }, py::arg("config") = py::none());

    m.def("action_to_curve", [](const std::array<double, 2>& pos, double heading, double kappa, const ActionVec& a,
                                double lambda) {
        const BezierCurve c = action_to_curve(pose_from(pos, heading, kappa), a, lambda);
        std::vector<std::array<double, 2>> pts;
        for (const auto& p : c.points) pts.push_back({p.x, p.y});
        return rows(pts, 2);
    }, py::arg("position"), py::arg("heading"), py::arg("curvature"), py::arg("action"), py::arg("lambda_") = 240.0,
          "Control points (5 x 2) of the segment an action produces.");

    m.def("check", [](const std::string& scenario_json, const std::array<double, 2>& pos, double heading,
                      double kappa, const ActionVec& a, const std::optional<std::string>& config) {
        const SimConfig sim = config_from(config);
        const EnvConfig cfg = sim.env_config();
        const Scenario s = load_map(scenario_json, sim.scenario_params());
        return std::string(to_string(covsim::check(s.map, s.nfzs, pose_from(pos, heading, kappa), a,
                                                   cfg.resolved_feasibility(), cfg.lambda, cfg.power.v_const,
                                                   cfg.segment_time)));
    }, py::arg("scenario"), py::arg("position"), py::arg("heading"), py::arg("curvature"), py::arg("action"),
          py::arg("config") = py::none(), "Feasibility verdict of an action on a map file.");

    m.def("generate", [](std::uint64_t seed, double difficulty, const std::optional<std::string>& config) {
        return scenario_to_map_json(covsim::generate(config_from(config).scenario_params(), difficulty, seed)).dump();
    }, py::arg("seed"), py::arg("difficulty"), py::arg("config") = py::none(), "Scenario as map-file JSON.");

    m.def("next_difficulty", [](double progress, const std::optional<std::string>& config) {
        CurriculumState s = config_from(config).curriculum;
        s.progress = progress;
        return covsim::next_difficulty(s);
    }, py::arg("progress"), py::arg("config") = py::none());
    m.def("record", [](double progress, bool success, double difficulty, const std::optional<std::string>& config) {
        CurriculumState s = config_from(config).curriculum;
        s.progress = progress;
        return covsim::record(s, success, difficulty).progress;
    }, py::arg("progress"), py::arg("success"), py::arg("difficulty"), py::arg("config") = py::none(),
          "Updated curriculum progress.");

    m.def("run_rollout", [](const std::string& planner, std::uint64_t seed, double difficulty,
                            const std::optional<std::string>& map_text, const std::optional<std::string>& config,
                            bool with_trace) {
        const RolloutConfig rc = rollout_config(planner, seed, difficulty, map_text, config);
        RolloutResult r;
        {
            py::gil_scoped_release release;
            r = covsim::run_rollout(rc);
        }
        return py::make_tuple(report_to_json(r.report).dump(),
                              with_trace ? py::object(py::str(trace_to_json(r.trace).dump())) : py::none());
    }, py::arg("planner"), py::arg("seed"), py::arg("difficulty"), py::arg("map_text") = py::none(),
          py::arg("config") = py::none(), py::arg("with_trace") = false,
          "Report JSON and, optionally, trace JSON of one scripted episode.");

    m.def("run_eval", [](const std::string& planner, std::uint64_t first_seed, int episodes, double difficulty,
                         const std::optional<std::string>& config, int jobs) {
        const RolloutConfig rc = rollout_config(planner, first_seed, difficulty, std::nullopt, config);
        std::vector<EpisodeReport> reports;
        {
            py::gil_scoped_release release;
            reports = covsim::run_eval(rc, episodes, jobs);
        }
        return eval_to_json(reports).dump();
    }, py::arg("planner"), py::arg("first_seed"), py::arg("episodes"), py::arg("difficulty"),
          py::arg("config") = py::none(), py::arg("jobs") = 1);

    m.def("render_svg", [](const std::string& trace_json) {
        return covsim::render_svg(trace_from_json(nlohmann::json::parse(trace_json)));
    }, py::arg("trace"));

    py::class_<PyEnv>(m, "Env")
        .def(py::init<const std::optional<std::string>&>(), py::arg("config") = py::none())
        .def("reset", &PyEnv::reset, py::arg("seed"), py::arg("difficulty"))
        .def("reset_map", &PyEnv::reset_map, py::arg("map_text"))
        .def("step", &PyEnv::step, py::arg("action"),
             "Returns (obs, reward, terminated, truncated, info).")
        .def("step_json", &PyEnv::step_json, py::arg("action"))
        .def("sample_feasible_action", &PyEnv::sample_feasible_action, py::arg("seed"), py::arg("max_tries") = 1000)
        .def("greedy_action", &PyEnv::greedy_action, py::arg("seed"))
        .def_property_readonly("pose", &PyEnv::pose)
        .def_property_readonly("coverage_remaining", &PyEnv::coverage_remaining)
        .def_property_readonly("done", &PyEnv::done)
        .def_property_readonly("step_index", &PyEnv::step_index)
        .def_property_readonly("scenario", &PyEnv::scenario_json);

    py::class_<PySession>(m, "ProtocolSession")
        .def(py::init<const std::optional<std::string>&>(), py::arg("config") = py::none())
        .def("handle", &PySession::handle, py::arg("line"))
        .def_property_readonly("finished", &PySession::finished);
}
