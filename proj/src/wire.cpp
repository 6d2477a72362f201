#include "covsim/wire.hpp"

#include <string>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

template <std::size_t N>
std::array<double, N> fixed_row(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != N) {
        throw ParseError(field + ": expected " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!j[i].is_number()) throw ParseError(field + ": expected numbers");
        out[i] = j[i].get<double>();
    }
    return out;
}

const nlohmann::json& member(const nlohmann::json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("observation: missing \"") + key + "\"");
    return j[key];
}

}  // namespace

nlohmann::json observation_to_json(const Observation& obs) {
    nlohmann::json nfzs = nlohmann::json::array();
    for (const auto& row : obs.nfz_matrix) nfzs.push_back(row);
    nlohmann::json mask = nlohmann::json::array();
    for (bool b : obs.nfz_mask) mask.push_back(b);
    nlohmann::json zones = nlohmann::json::array();
    for (const auto& z : obs.zones) {
        nlohmann::json rects = nlohmann::json::array();
        for (const auto& r : z.rects) rects.push_back(r);
        zones.push_back({{"descriptor", z.descriptor}, {"rects", std::move(rects)}});
    }
    return {{"scalars", obs.scalars}, {"nfzs", std::move(nfzs)}, {"nfz_mask", std::move(mask)},
            {"zones", std::move(zones)}};
}

Observation observation_from_json(const nlohmann::json& j) {
    Observation obs;
    obs.scalars = fixed_row<8>(member(j, "scalars"), "scalars");

    const auto& nfzs = member(j, "nfzs");
    const auto& mask = member(j, "nfz_mask");
    if (!nfzs.is_array() || !mask.is_array() || nfzs.size() != mask.size()) {
        throw ParseError("nfzs/nfz_mask: expected arrays of equal length");
    }
    for (std::size_t i = 0; i < nfzs.size(); ++i) {
        obs.nfz_matrix.push_back(fixed_row<13>(nfzs[i], "nfzs[" + std::to_string(i) + "]"));
        if (!mask[i].is_boolean()) throw ParseError("nfz_mask: expected booleans");
        obs.nfz_mask.push_back(mask[i].get<bool>());
    }

    const auto& zones = member(j, "zones");
    if (!zones.is_array()) throw ParseError("zones: expected an array");
    for (std::size_t z = 0; z < zones.size(); ++z) {
        const std::string base = "zones[" + std::to_string(z) + "]";
        ZoneObservation zo;
        zo.descriptor = fixed_row<15>(member(zones[z], "descriptor"), base + ".descriptor");
        const auto& rects = member(zones[z], "rects");
        if (!rects.is_array()) throw ParseError(base + ".rects: expected an array");
        for (std::size_t r = 0; r < rects.size(); ++r) {
            zo.rects.push_back(fixed_row<5>(rects[r], base + ".rects[" + std::to_string(r) + "]"));
        }
        obs.zones.push_back(std::move(zo));
    }
    return obs;
}

nlohmann::json step_to_json(const StepResult& r) {
    return {
        {"obs", observation_to_json(r.observation)},
        {"reward", r.reward},
        {"terminated", r.terminated},
        {"truncated", r.truncated},
        {"info",
         {{"verdict", std::string(to_string(r.info.verdict))},
          {"coverage_remaining", r.info.coverage_remaining},
          {"energy_j", r.info.energy},
          {"frames_applied", r.info.frames_applied}}},
    };
}

nlohmann::json pose_to_json(const UavPose& p) {
    return {{"pos", {p.position.x, p.position.y}},
            {"dir", {p.direction.x, p.direction.y}},
            {"curvature", p.curvature}};
}

}  // namespace covsim
