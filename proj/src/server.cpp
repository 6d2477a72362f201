#include "covsim/server.hpp"

#include <istream>
#include <ostream>

#include "covsim/errors.hpp"
#include "covsim/wire.hpp"

namespace covsim {

namespace {

struct ProtocolError {
    std::string code;
    std::string message;
};

nlohmann::json error_json(const std::string& code, const std::string& message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

ProtocolSession::ProtocolSession(SimConfig cfg)
    : cfg_(std::move(cfg)), env_(cfg_.env_config()), curriculum_(cfg_.curriculum) {}

nlohmann::json ProtocolSession::handle(const std::string& line) {
    nlohmann::json req;
    try {
        req = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        return error_json("bad_json", e.what());
    }
    if (!req.is_object() || !req.contains("cmd") || !req["cmd"].is_string()) {
        return error_json("bad_cmd", "request must be an object with a string \"cmd\"");
    }
    const std::string cmd = req["cmd"].get<std::string>();
    try {
        if (cmd == "reset") return handle_reset(req);
        if (cmd == "step") return handle_step(req);
        if (cmd == "curriculum_record") return handle_record(req);
        if (cmd == "curriculum_query") return curriculum_json();
        if (cmd == "config") return {{"config", config_to_json(cfg_)}};
        if (cmd == "shutdown") {
            finished_ = true;
            return {{"ok", true}};
        }
        return error_json("bad_cmd", "unknown command \"" + cmd + "\"");
    } catch (const ProtocolError& e) {
        return error_json(e.code, e.message);
    } catch (const ParseError& e) {
        return error_json("scenario_error", e.what());
    } catch (const ValidationError& e) {
        return error_json("scenario_error", e.what());
    } catch (const GenerationFailure& e) {
        return error_json("scenario_error", e.what());
    } catch (const std::exception& e) {
        return error_json("internal", e.what());
    }
}

nlohmann::json ProtocolSession::handle_reset(const nlohmann::json& req) {
    Scenario scenario;
    if (req.contains("map")) {
        if (!req["map"].is_string()) throw ProtocolError{"bad_args", "map: expected a file path"};
        std::string text;
        try {
            text = read_text_file(req["map"].get<std::string>());
        } catch (const std::runtime_error& e) {
            throw ProtocolError{"bad_args", e.what()};
        }
        scenario = load_map(text, cfg_.scenario_params());
    } else {
        std::uint64_t seed = 0;
        if (req.contains("seed")) {
            if (!req["seed"].is_number_unsigned()) throw ProtocolError{"bad_args", "seed: expected a non-negative integer"};
            seed = req["seed"].get<std::uint64_t>();
        }
        double difficulty = next_difficulty(curriculum_);
        if (req.contains("difficulty")) {
            if (!req["difficulty"].is_number()) throw ProtocolError{"bad_args", "difficulty: expected a number"};
            difficulty = req["difficulty"].get<double>();
            if (!(difficulty > 0.0 && difficulty <= 1.0)) {
                throw ProtocolError{"bad_args", "difficulty: must lie in (0, 1]"};
            }
        }
        scenario = generate(cfg_.scenario_params(), difficulty, seed);
    }
    last_difficulty_ = scenario.difficulty;
    Observation obs = env_.reset(scenario);
    return {
        {"obs", observation_to_json(obs)},
        {"info",
         {{"coverage_remaining", env_.state().tzs.area()},
          {"coverage_total", scenario.tzs.area()},
          {"difficulty", scenario.difficulty},
          {"seed", scenario.seed},
          {"terminated", env_.state().terminated}}},
    };
}

nlohmann::json ProtocolSession::handle_step(const nlohmann::json& req) {
    if (!env_.started()) throw ProtocolError{"no_episode", "send reset before step"};
    if (env_.done()) throw ProtocolError{"episode_over", "episode has ended; send reset"};
    const auto it = req.find("action");
    if (it == req.end() || !it->is_array() || it->size() != 6) {
        throw ProtocolError{"bad_args", "action: expected an array of 6 numbers"};
    }
    ActionVec a{};
    for (std::size_t i = 0; i < 6; ++i) {
        if (!(*it)[i].is_number()) throw ProtocolError{"bad_args", "action: expected an array of 6 numbers"};
        a[i] = (*it)[i].get<double>();
    }
    if (!action_in_range(a)) throw ProtocolError{"bad_args", "action: components must lie in [-1, 1]"};
    return step_to_json(env_.step(a));
}

nlohmann::json ProtocolSession::handle_record(const nlohmann::json& req) {
    if (!req.contains("success") || !req["success"].is_boolean()) {
        throw ProtocolError{"bad_args", "success: expected a boolean"};
    }
    double difficulty = 0.0;
    if (req.contains("difficulty")) {
        if (!req["difficulty"].is_number()) throw ProtocolError{"bad_args", "difficulty: expected a number"};
        difficulty = req["difficulty"].get<double>();
    } else if (last_difficulty_) {
        difficulty = *last_difficulty_;
    } else {
        throw ProtocolError{"bad_args", "difficulty: required before the first reset"};
    }
    if (!(difficulty > 0.0 && difficulty <= 1.0)) throw ProtocolError{"bad_args", "difficulty: must lie in (0, 1]"};
    curriculum_ = record(curriculum_, req["success"].get<bool>(), difficulty);
    return curriculum_json();
}

nlohmann::json ProtocolSession::curriculum_json() const {
    return {{"progress", curriculum_.progress}, {"difficulty", next_difficulty(curriculum_)}};
}

void serve_stdio(std::istream& in, std::ostream& out, const SimConfig& cfg) {
    ProtocolSession session(cfg);
    std::string line;
    while (!session.finished() && std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out << session.handle(line).dump() << '\n' << std::flush;
    }
}

}  // namespace covsim
