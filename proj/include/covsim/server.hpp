#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "covsim/config.hpp"

namespace covsim {

// Newline-delimited JSON request/response protocol for external agents.
// One environment and one curriculum per session.
//
//   {"cmd":"reset","seed":S,"difficulty":D}    difficulty defaults to the
//                                              curriculum's next difficulty
//   {"cmd":"reset","map":"path.json"}           hand-crafted map file
//   {"cmd":"step","action":[a0..a5]}
//   {"cmd":"curriculum_record","success":b[,"difficulty":D]}
//   {"cmd":"curriculum_query"}
//   {"cmd":"config"}
//   {"cmd":"shutdown"}
//
// Failures answer {"error":{"code":..., "message":...}} and the session
// continues.  Codes: bad_json, bad_cmd, bad_args, no_episode, episode_over,
// scenario_error, internal.
class ProtocolSession {
public:
    explicit ProtocolSession(SimConfig cfg);

    /// Handles one request line and returns the response object.
    [[nodiscard]] nlohmann::json handle(const std::string& line);
    [[nodiscard]] bool finished() const noexcept { return finished_; }

private:
    nlohmann::json handle_reset(const nlohmann::json& req);
    nlohmann::json handle_step(const nlohmann::json& req);
    nlohmann::json handle_record(const nlohmann::json& req);
    nlohmann::json curriculum_json() const;

    SimConfig cfg_;
    Environment env_;
    CurriculumState curriculum_;
    std::optional<double> last_difficulty_;
    bool finished_ = false;
};

/// Serves requests from `in` until end of input or shutdown.
void serve_stdio(std::istream& in, std::ostream& out, const SimConfig& cfg);

}  // namespace covsim
