#include "covsim/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

using Setter = std::function<void(SimConfig&, const nlohmann::json&, const std::string&)>;

double as_number(const nlohmann::json& v, const std::string& field) {
    if (!v.is_number()) throw ParseError(field + ": expected a number");
    return v.get<double>();
}

int as_int(const nlohmann::json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ParseError(field + ": expected an integer");
    return v.get<int>();
}

bool as_bool(const nlohmann::json& v, const std::string& field) {
    if (!v.is_boolean()) throw ParseError(field + ": expected a boolean");
    return v.get<bool>();
}

#define COVSIM_NUM(expr) [](SimConfig& c, const nlohmann::json& v, const std::string& f) { expr = as_number(v, f); }
#define COVSIM_INT(expr) [](SimConfig& c, const nlohmann::json& v, const std::string& f) { expr = as_int(v, f); }

const std::map<std::string, std::map<std::string, Setter>>& setters() {
    static const std::map<std::string, std::map<std::string, Setter>> table{
        {"world",
         {
             {"w_max", COVSIM_NUM(c.world.w_max)},
             {"n_nfz", COVSIM_INT(c.world.n_nfz)},
             {"n_tz", COVSIM_INT(c.world.n_tz)},
             {"nfz_side_min", COVSIM_NUM(c.world.nfz_side_min)},
             {"nfz_side_max", COVSIM_NUM(c.world.nfz_side_max)},
             {"tz_side_min", COVSIM_NUM(c.world.tz_side_min)},
             {"tz_side_max", COVSIM_NUM(c.world.tz_side_max)},
             {"aspect_max", COVSIM_NUM(c.world.aspect_max)},
             {"start_margin", COVSIM_NUM(c.start_margin_override)},
             {"min_tz_area", COVSIM_NUM(c.min_tz_area_override)},
         }},
        {"uav",
         {
             {"v_const", COVSIM_NUM(c.env.power.v_const)},
             {"phi_max_deg", [](SimConfig& c, const nlohmann::json& v, const std::string& f) {
                  c.env.power.phi_max = as_number(v, f) * kDeg;
              }},
             {"g", COVSIM_NUM(c.env.power.g)},
             {"altitude", COVSIM_NUM(c.env.camera.altitude)},
             {"view_angle_deg", [](SimConfig& c, const nlohmann::json& v, const std::string& f) {
                  c.env.camera.view_angle = as_number(v, f) * kDeg;
              }},
         }},
        {"power",
         {
             {"A", COVSIM_NUM(c.env.power.A)},
             {"B", COVSIM_NUM(c.env.power.B)},
         }},
        {"timing",
         {
             {"segment_time", COVSIM_NUM(c.env.segment_time)},
             {"frame_period", COVSIM_NUM(c.env.camera.frame_period)},
             {"dt", COVSIM_NUM(c.env.dt)},
         }},
        {"action", {{"lambda", COVSIM_NUM(c.env.lambda)}}},
        {"feasibility",
         {
             {"n_check_points", COVSIM_INT(c.env.feasibility.n_check_points)},
             {"length_min_factor", COVSIM_NUM(c.env.feasibility.length_min_factor)},
             {"length_max_factor", COVSIM_NUM(c.env.feasibility.length_max_factor)},
             {"kappa_max", COVSIM_NUM(c.env.kappa_max_override)},
             {"refine_curvature", [](SimConfig& c, const nlohmann::json& v, const std::string& f) {
                  c.env.feasibility.refine_curvature = as_bool(v, f);
              }},
             {"spacing",
              [](SimConfig& c, const nlohmann::json& v, const std::string& f) {
                  const std::string s = v.is_string() ? v.get<std::string>() : "";
                  if (s == "uniform_u") {
                      c.env.feasibility.spacing = CheckSpacing::uniform_u;
                  } else if (s == "arc_length") {
                      c.env.feasibility.spacing = CheckSpacing::arc_length;
                  } else {
                      throw ParseError(f + ": expected \"uniform_u\" or \"arc_length\"");
                  }
              }},
         }},
        {"env",
         {
             {"terminal_reward", COVSIM_NUM(c.env.terminal_reward)},
             {"max_violations", COVSIM_INT(c.env.max_violations)},
             {"max_steps", COVSIM_INT(c.env.max_steps)},
             {"n_nfz_obs", COVSIM_INT(c.n_nfz_obs_override)},
             {"frame_at_reset", [](SimConfig& c, const nlohmann::json& v, const std::string& f) {
                  c.env.frame_at_reset = as_bool(v, f);
              }},
         }},
        {"curriculum",
         {
             {"tau", COVSIM_NUM(c.curriculum.tau)},
             {"success_threshold", COVSIM_NUM(c.curriculum.success_threshold)},
             {"min_difficulty", COVSIM_NUM(c.curriculum.min_difficulty)},
         }},
        {"planner",
         {
             {"k_candidates", COVSIM_INT(c.planner.k_candidates)},
             {"max_tries", COVSIM_INT(c.planner.max_tries)},
             {"lookahead_tries", COVSIM_INT(c.planner.lookahead_tries)},
             {"lookahead_depth", COVSIM_INT(c.planner.lookahead_depth)},
             {"lookahead_branches", COVSIM_INT(c.planner.lookahead_branches)},
             {"pool_size", COVSIM_INT(c.planner.pool_size)},
         }},
    };
    return table;
}

#undef COVSIM_NUM
#undef COVSIM_INT

}  // namespace

ScenarioParams SimConfig::scenario_params() const {
    ScenarioParams p = world;
    p.start_margin = start_margin_override.value_or(2.0 * env.power.v_const * env.segment_time / std::numbers::pi);
    const double side = env.camera.fov_side();
    p.min_tz_area = min_tz_area_override.value_or(side * side);
    return p;
}

EnvConfig SimConfig::env_config() const {
    EnvConfig e = env;
    e.w_max = world.w_max;
    e.n_nfz_obs = n_nfz_obs_override.value_or(world.n_nfz);
    return e;
}

void SimConfig::validate() const {
    env_config().validate();
    covsim::validate(curriculum);
    const auto& w = world;
    if (!(w.w_max > 0.0 && w.n_nfz >= 0 && w.n_tz >= 1)) throw ValidationError("config: world sizes out of range");
    if (!(w.nfz_side_min > 0.0 && w.nfz_side_min <= w.nfz_side_max && w.tz_side_min > 0.0 &&
          w.tz_side_min <= w.tz_side_max)) {
        throw ValidationError("config: side ranges must satisfy 0 < min <= max");
    }
    if (!(w.aspect_max >= 1.0)) throw ValidationError("config: aspect_max must be >= 1");
    if (planner.k_candidates < 1 || planner.max_tries < 1 || planner.lookahead_tries < 0 ||
        planner.lookahead_depth < 0 || planner.lookahead_branches < 1 || planner.pool_size < 0) {
        throw ValidationError("config: planner counts must be >= 1 (lookahead_tries, pool_size >= 0)");
    }
}

SimConfig apply_config_json(SimConfig base, const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("config: top level must be a JSON object");
    const auto& table = setters();
    for (const auto& [section, body] : j.items()) {
        const auto it = table.find(section);
        if (it == table.end()) throw ParseError("config: unknown section \"" + section + "\"");
        if (!body.is_object()) throw ParseError(section + ": expected an object");
        for (const auto& [key, value] : body.items()) {
            const auto kt = it->second.find(key);
            const std::string field = section + "." + key;
            if (kt == it->second.end()) throw ParseError("config: unknown key \"" + field + "\"");
            kt->second(base, value, field);
        }
    }
    base.validate();
    return base;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SimConfig load_config(const std::string& path) {
    std::string chosen = path;
    if (chosen.empty()) {
        if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') chosen = env;
    }
    SimConfig cfg;
    if (chosen.empty()) return cfg;
    const std::string text = read_text_file(chosen);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(chosen + ": " + e.what());
    }
    return apply_config_json(cfg, j);
}

nlohmann::json config_to_json(const SimConfig& c) {
    const ScenarioParams& p = c.world;
    const EnvConfig& e = c.env;
    nlohmann::json out = {
        {"world",
         {{"w_max", p.w_max},
          {"n_nfz", p.n_nfz},
          {"n_tz", p.n_tz},
          {"nfz_side_min", p.nfz_side_min},
          {"nfz_side_max", p.nfz_side_max},
          {"tz_side_min", p.tz_side_min},
          {"tz_side_max", p.tz_side_max},
          {"aspect_max", p.aspect_max}}},
        {"uav",
         {{"v_const", e.power.v_const},
          {"phi_max_deg", e.power.phi_max / kDeg},
          {"g", e.power.g},
          {"altitude", e.camera.altitude},
          {"view_angle_deg", e.camera.view_angle / kDeg}}},
        {"power", {{"A", e.power.A}, {"B", e.power.B}}},
        {"timing", {{"segment_time", e.segment_time}, {"frame_period", e.camera.frame_period}, {"dt", e.dt}}},
        {"action", {{"lambda", e.lambda}}},
        {"feasibility",
         {{"n_check_points", e.feasibility.n_check_points},
          {"length_min_factor", e.feasibility.length_min_factor},
          {"length_max_factor", e.feasibility.length_max_factor},
          {"spacing", e.feasibility.spacing == CheckSpacing::arc_length ? "arc_length" : "uniform_u"},
          {"refine_curvature", e.feasibility.refine_curvature}}},
        {"env",
         {{"terminal_reward", e.terminal_reward},
          {"max_violations", e.max_violations},
          {"max_steps", e.max_steps},
          {"frame_at_reset", e.frame_at_reset}}},
        {"curriculum",
         {{"tau", c.curriculum.tau},
          {"success_threshold", c.curriculum.success_threshold},
          {"min_difficulty", c.curriculum.min_difficulty}}},
        {"planner",
         {{"k_candidates", c.planner.k_candidates},
          {"max_tries", c.planner.max_tries},
          {"lookahead_tries", c.planner.lookahead_tries},
          {"lookahead_depth", c.planner.lookahead_depth},
          {"lookahead_branches", c.planner.lookahead_branches},
          {"pool_size", c.planner.pool_size}}},
    };
    // Derived values are written only when pinned, so a round trip keeps
    // them tied to the parameters they derive from.
    if (e.kappa_max_override) out["feasibility"]["kappa_max"] = *e.kappa_max_override;
    if (c.start_margin_override) out["world"]["start_margin"] = *c.start_margin_override;
    if (c.min_tz_area_override) out["world"]["min_tz_area"] = *c.min_tz_area_override;
    if (c.n_nfz_obs_override) out["env"]["n_nfz_obs"] = *c.n_nfz_obs_override;
    return out;
}

}  // namespace covsim
