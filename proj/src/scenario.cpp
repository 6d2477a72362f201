#include "covsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "covsim/errors.hpp"
#include "covsim/rng.hpp"

namespace covsim {

namespace {

// Stream tags; each pipeline stage draws from its own stream so that, e.g.,
// changing the difficulty never perturbs the obstacle layout.
enum Stream : std::uint64_t { kNfzStream = 1, kTzStream = 2, kCropStream = 3, kStartStream = 4 };

constexpr int kCropTries = 100;
constexpr int kCropReseeds = 10;
constexpr int kStartTries = 1000;

Rect random_rect(Rng& rng, const Rect& bounds, double side_min, double side_max) {
    const double w = std::min(rng.uniform(side_min, side_max), bounds.width());
    const double h = std::min(rng.uniform(side_min, side_max), bounds.height());
    const double x = rng.uniform(bounds.x_min, bounds.x_max - w);
    const double y = rng.uniform(bounds.y_min, bounds.y_max - h);
    return {x, y, x + w, y + h};
}

bool start_is_clear(Vec2 p, const RectSet& nfzs, double margin) {
    return std::none_of(nfzs.begin(), nfzs.end(),
                        [&](const Rect& r) { return distance_to_rect(p, r) < margin; });
}

std::optional<UavPose> sample_start(Rng& rng, const Rect& crop, const RectSet& nfzs, double margin) {
    const Rect inner{crop.x_min + margin, crop.y_min + margin, crop.x_max - margin, crop.y_max - margin};
    if (!(inner.x_min <= inner.x_max && inner.y_min <= inner.y_max)) return std::nullopt;
    for (int i = 0; i < kStartTries; ++i) {
        const Vec2 p{rng.uniform(inner.x_min, inner.x_max), rng.uniform(inner.y_min, inner.y_max)};
        const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        if (start_is_clear(p, nfzs, margin)) {
            return UavPose{p, {std::cos(heading), std::sin(heading)}, 0.0};
        }
    }
    return std::nullopt;
}

RectSet subtract_all(RectSet tzs, const RectSet& nfzs) {
    for (const auto& nfz : nfzs) tzs = rect_set_subtract(tzs, nfz);
    return tzs;
}

}  // namespace

RectSet generate_tzs(const ScenarioParams& params, const Rect& bounds, const RectSet& nfzs,
                     std::uint64_t seed) {
    Rng rng = Rng::derive(seed, kTzStream);
    RectSet tzs;
    for (int i = 0; i < params.n_tz; ++i) {
        tzs = union_insert(tzs, random_rect(rng, bounds, params.tz_side_min, params.tz_side_max));
    }
    return subtract_all(std::move(tzs), nfzs);
}

Scenario generate(const ScenarioParams& params, double difficulty, std::uint64_t seed) {
    if (!(difficulty > 0.0 && difficulty <= 1.0)) {
        throw ContractViolation("difficulty must lie in (0, 1]");
    }
    const Rect world{0.0, 0.0, params.w_max, params.w_max};

    Rng nfz_rng = Rng::derive(seed, kNfzStream);
    RectSet nfzs;
    for (int i = 0; i < params.n_nfz; ++i) {
        nfzs.push_back(random_rect(nfz_rng, world, params.nfz_side_min, params.nfz_side_max));
    }
    const RectSet tzs = generate_tzs(params, world, nfzs, seed);

    const double crop_area = difficulty * params.w_max * params.w_max;
    for (int reseed = 0; reseed < kCropReseeds; ++reseed) {
        Rng crop_rng = Rng::derive(splitmix64(seed) + static_cast<std::uint64_t>(reseed), kCropStream);
        Rng start_rng = Rng::derive(splitmix64(seed) + static_cast<std::uint64_t>(reseed), kStartStream);
        for (int attempt = 0; attempt < kCropTries; ++attempt) {
            const double ratio = crop_rng.uniform(1.0 / params.aspect_max, params.aspect_max);
            const double w = std::min(std::sqrt(crop_area * ratio), params.w_max);
            const double h = std::min(std::sqrt(crop_area / ratio), params.w_max);
            const double x0 = crop_rng.uniform(0.0, params.w_max - w);
            const double y0 = crop_rng.uniform(0.0, params.w_max - h);
            const Rect crop{x0, y0, x0 + w, y0 + h};

            RectSet crop_tzs = rect_set_clip(tzs, crop);
            if (crop_tzs.area() < params.min_tz_area) continue;
            RectSet crop_nfzs = rect_set_clip(nfzs, crop);
            auto start = sample_start(start_rng, crop, crop_nfzs, params.start_margin);
            if (!start) continue;

            return Scenario{crop, std::move(crop_nfzs), std::move(crop_tzs), *start, difficulty, seed};
        }
    }
    throw GenerationFailure("no crop with sufficient target area and a valid start pose (seed " +
                            std::to_string(seed) + ", difficulty " + std::to_string(difficulty) + ")");
}

Rect rect_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 4 || !std::all_of(j.begin(), j.end(), [](const auto& v) {
            return v.is_number();
        })) {
        throw ParseError(field + ": expected an array of 4 numbers [x0,y0,x1,y1]");
    }
    const Rect r{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (!r.valid()) throw ValidationError(field + ": rectangle must satisfy x0 < x1 and y0 < y1");
    return r;
}

nlohmann::json rect_to_json(const Rect& r) { return nlohmann::json::array({r.x_min, r.y_min, r.x_max, r.y_max}); }

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

RectSet rect_list_from_json(const nlohmann::json& root, const char* key) {
    const auto& arr = root.at(key);
    if (!arr.is_array()) throw ParseError(std::string(key) + ": expected an array of rectangles");
    RectSet out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        out.push_back(rect_from_json(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
}

double number_field(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) throw ParseError(field + ": expected a number");
    return j.get<double>();
}

}  // namespace

Scenario load_map(std::string_view text, const ScenarioParams& params) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
    }
    if (!root.is_object()) throw ParseError("map file: top level must be a JSON object");
    if (!root.contains("map")) throw ParseError("map: field is required");

    Scenario s;
    s.map = rect_from_json(root["map"], "map");
    s.nfzs = root.contains("nfzs") ? rect_set_clip(rect_list_from_json(root, "nfzs"), s.map) : RectSet{};

    const bool has_tzs = root.contains("tzs");
    const bool has_seed = root.contains("tz_seed");
    if (has_tzs == has_seed) throw ParseError("tzs/tz_seed: exactly one of the two fields is required");
    if (has_seed) {
        const auto& js = root["tz_seed"];
        if (!js.is_number_integer()) throw ParseError("tz_seed: expected an integer");
        s.seed = js.get<std::uint64_t>();
        s.tzs = generate_tzs(params, s.map, s.nfzs, s.seed);
    } else {
        RectSet merged;
        for (const auto& r : rect_list_from_json(root, "tzs")) merged = union_insert(merged, r);
        s.tzs = subtract_all(rect_set_clip(merged, s.map), s.nfzs);
    }
    if (root.contains("seed")) {
        if (!root["seed"].is_number_integer()) throw ParseError("seed: expected an integer");
        s.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("difficulty")) s.difficulty = number_field(root["difficulty"], "difficulty");

    if (root.contains("start")) {
        const auto& st = root["start"];
        if (!st.is_object() || !st.contains("pos")) throw ParseError("start: expected {\"pos\":[x,y], ...}");
        const auto& pos = st["pos"];
        if (!pos.is_array() || pos.size() != 2) throw ParseError("start.pos: expected [x,y]");
        s.start_pose.position = {number_field(pos[0], "start.pos[0]"), number_field(pos[1], "start.pos[1]")};
        const double heading = st.contains("heading_rad") ? number_field(st["heading_rad"], "start.heading_rad") : 0.0;
        s.start_pose.direction = {std::cos(heading), std::sin(heading)};
        s.start_pose.curvature = 0.0;
    } else {
        Rng rng = Rng::derive(s.seed, kStartStream);
        auto start = sample_start(rng, s.map, s.nfzs, params.start_margin);
        if (!start) throw ValidationError("start: no valid start position could be sampled");
        s.start_pose = *start;
    }

    if (!point_in_rect(s.start_pose.position, s.map)) throw ValidationError("start.pos: outside the map");
    for (std::size_t i = 0; i < s.nfzs.size(); ++i) {
        if (point_in_rect(s.start_pose.position, s.nfzs[i])) {
            throw ValidationError("start.pos: inside nfzs[" + std::to_string(i) + "]");
        }
    }
    if (!(s.tzs.area() > 0.0)) throw ValidationError("tzs: no target area remains after removing NFZs");
    if (!(s.difficulty > 0.0 && s.difficulty <= 1.0)) throw ValidationError("difficulty: must lie in (0, 1]");
    return s;
}

nlohmann::json scenario_to_map_json(const Scenario& s) {
    nlohmann::json nfzs = nlohmann::json::array();
    for (const auto& r : s.nfzs) nfzs.push_back(rect_to_json(r));
    nlohmann::json tzs = nlohmann::json::array();
    for (const auto& r : s.tzs) tzs.push_back(rect_to_json(r));
    const Vec2 p = s.start_pose.position;
    return {
        {"map", rect_to_json(s.map)},
        {"nfzs", std::move(nfzs)},
        {"tzs", std::move(tzs)},
        {"start", {{"pos", {p.x, p.y}},
                   {"heading_rad", std::atan2(s.start_pose.direction.y, s.start_pose.direction.x)}}},
        {"seed", s.seed},
        {"difficulty", s.difficulty},
    };
}

}  // namespace covsim
