#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "covsim/errors.hpp"
#include "covsim/scenario.hpp"

using namespace covsim;

namespace {

bool interior_overlap(const Rect& a, const Rect& b) {
    return std::min(a.x_max, b.x_max) > std::max(a.x_min, b.x_min) &&
           std::min(a.y_max, b.y_max) > std::max(a.y_min, b.y_min);
}

bool inside(const Rect& inner, const Rect& outer) {
    return inner.x_min >= outer.x_min && inner.x_max <= outer.x_max && inner.y_min >= outer.y_min &&
           inner.y_max <= outer.y_max;
}

void check_valid(const Scenario& s, const ScenarioParams& p) {
    CHECK(s.tzs.area() > 0.0);
    CHECK(s.tzs.area() >= p.min_tz_area);
    CHECK(s.tzs.area() <= s.difficulty * p.w_max * p.w_max * (1 + 1e-12));
    for (const auto& t : s.tzs) {
        CHECK(inside(t, s.map));
        for (const auto& n : s.nfzs) CHECK_FALSE(interior_overlap(t, n));
    }
    for (std::size_t i = 0; i < s.tzs.size(); ++i)
        for (std::size_t j = i + 1; j < s.tzs.size(); ++j) CHECK_FALSE(interior_overlap(s.tzs[i], s.tzs[j]));
    for (const auto& n : s.nfzs) CHECK(inside(n, s.map));

    const Vec2 p0 = s.start_pose.position;
    CHECK(p0.x - s.map.x_min >= p.start_margin);
    CHECK(s.map.x_max - p0.x >= p.start_margin);
    CHECK(p0.y - s.map.y_min >= p.start_margin);
    CHECK(s.map.y_max - p0.y >= p.start_margin);
    for (const auto& n : s.nfzs) {
        const double dx = std::max({n.x_min - p0.x, 0.0, p0.x - n.x_max});
        const double dy = std::max({n.y_min - p0.y, 0.0, p0.y - n.y_max});
        CHECK(std::hypot(dx, dy) >= p.start_margin);
    }
    CHECK(s.start_pose.curvature == 0.0);
    CHECK(s.start_pose.direction.norm() == doctest::Approx(1.0));
}

}  // namespace

TEST_CASE("generate: crop area is linear in difficulty") {
    const ScenarioParams p;
    for (double d : {0.05, 0.1, 0.2, 1.0 / 3.0}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Scenario s = generate(p, d, seed);
            // Below d = 1/3 no aspect draw makes a side exceed the map.
            CHECK(s.map.area() == doctest::Approx(d * 4e6).epsilon(1e-12));
            const double ratio = s.map.width() / s.map.height();
            CHECK(ratio >= 1.0 / 3.0 - 1e-12);
            CHECK(ratio <= 3.0 + 1e-12);
        }
    }
    CHECK(generate(p, 0.1, 7).map.area() == doctest::Approx(400000.0));

    ScenarioParams square = p;
    square.aspect_max = 1.0;
    CHECK(generate(square, 1.0, 3).map == Rect{0, 0, 2000, 2000});
    CHECK(generate(p, 1.0, 3).map.area() <= 4e6);
}

TEST_CASE("generate is deterministic") {
    const ScenarioParams p;
    const Scenario a = generate(p, 1.0, 42);
    const Scenario b = generate(p, 1.0, 42);
    CHECK(a == b);
    CHECK(scenario_to_map_json(a).dump() == scenario_to_map_json(b).dump());
    CHECK_FALSE(generate(p, 1.0, 43) == a);
    CHECK(generate(p, 0.25, 9) == generate(p, 0.25, 9));
}

TEST_CASE("generate: scenarios satisfy the invariants") {
    const ScenarioParams p;
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
        for (double d : {0.1, 0.4, 0.7, 1.0}) check_valid(generate(p, d, seed), p);
    }
}

TEST_CASE("generate: difficulty does not perturb the obstacle layout") {
    ScenarioParams square;
    square.aspect_max = 1.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Scenario full = generate(square, 1.0, seed);
        const Scenario small = generate(square, 0.3, seed);
        CHECK(small.nfzs == rect_set_clip(full.nfzs, small.map));
        // TZs are the clipped union minus NFZs in both cases.
        CHECK(small.tzs.area() == doctest::Approx(rect_set_clip(full.tzs, small.map).area()));
    }
}

TEST_CASE("generate: failures") {
    ScenarioParams p;
    p.n_tz = 0;
    CHECK_THROWS_AS((void)generate(p, 0.5, 1), GenerationFailure);
    CHECK_THROWS_AS((void)generate(ScenarioParams{}, 0.0, 1), ContractViolation);
    CHECK_THROWS_AS((void)generate(ScenarioParams{}, 1.5, 1), ContractViolation);
}

TEST_CASE("load_map: explicit rects") {
    const Scenario s = load_map(R"({
        "map": [0, 0, 1000, 800],
        "nfzs": [[100, 100, 200, 200]],
        "tzs": [[500, 500, 700, 700]],
        "start": {"pos": [400, 300], "heading_rad": 1.5707963267948966}
    })");
    CHECK(s.map == Rect{0, 0, 1000, 800});
    REQUIRE(s.nfzs.size() == 1);
    CHECK(s.nfzs[0] == Rect{100, 100, 200, 200});
    REQUIRE(s.tzs.size() == 1);
    CHECK(s.tzs[0] == Rect{500, 500, 700, 700});
    CHECK(s.start_pose.position == Vec2{400, 300});
    CHECK(s.start_pose.direction.x == doctest::Approx(0.0));
    CHECK(s.start_pose.direction.y == doctest::Approx(1.0));

    const Scenario again = load_map(scenario_to_map_json(s).dump());
    CHECK(again.map == s.map);
    CHECK(again.nfzs == s.nfzs);
    CHECK(again.tzs == s.tzs);
    CHECK(again.start_pose.position == s.start_pose.position);
}

TEST_CASE("load_map: tz_seed reproduces the target sub-pipeline") {
    const ScenarioParams p;
    const Scenario s = load_map(R"({"map": [0, 0, 2000, 2000], "nfzs": [[900, 900, 1100, 1100]], "tz_seed": 17,
                                    "start": {"pos": [100, 100]}})");
    CHECK(s.tzs == generate_tzs(p, s.map, s.nfzs, 17));
    CHECK(s.tzs.area() > 0.0);
    for (const auto& t : s.tzs) CHECK_FALSE(interior_overlap(t, s.nfzs[0]));
}

TEST_CASE("load_map: targets lose their NFZ overlap") {
    const Scenario s = load_map(R"({"map": [0, 0, 1000, 1000], "nfzs": [[150, 150, 250, 250]],
                                    "tzs": [[100, 100, 300, 300]], "start": {"pos": [800, 800]}})");
    CHECK(s.tzs.area() == doctest::Approx(200.0 * 200.0 - 100.0 * 100.0));
    for (const auto& t : s.tzs) CHECK_FALSE(interior_overlap(t, s.nfzs[0]));
}

TEST_CASE("load_map: overlapping targets are merged") {
    const Scenario s = load_map(R"({"map": [0, 0, 1000, 1000], "tzs": [[0, 0, 200, 200], [100, 100, 300, 300]],
                                    "start": {"pos": [800, 800]}})");
    CHECK(s.tzs.area() == doctest::Approx(70000.0));
}

TEST_CASE("load_map: errors") {
    const auto parse_error = [](const char* text) {
        try {
            (void)load_map(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("<no error>");
    };
    CHECK(parse_error("{\n\"map\": [0,0,10,10],\n\"tzs\": [[1,1,2,2]] oops\n}").find("line 3") != std::string::npos);
    CHECK(parse_error(R"({"tzs": [[1,1,2,2]]})").find("map") != std::string::npos);
    CHECK(parse_error(R"({"map": [0,0,10], "tzs": []})").find("map") != std::string::npos);
    CHECK(parse_error(R"({"map": [0,0,10,10], "tzs": [[1,1,2,"x"]]})").find("tzs[0]") != std::string::npos);
    CHECK(parse_error(R"({"map": [0,0,10,10], "tzs": [[1,1,2,2]], "tz_seed": 3})").find("tz_seed") !=
          std::string::npos);
    CHECK(parse_error(R"({"map": [0,0,10,10], "tz_seed": 1.5})").find("tz_seed") != std::string::npos);
    CHECK(parse_error("[1,2]").find("object") != std::string::npos);

    CHECK_THROWS_AS((void)load_map(R"({"map": [10,0,0,10], "tzs": [[1,1,2,2]]})"), ValidationError);
    CHECK_THROWS_AS((void)load_map(R"({"map": [0,0,1000,1000], "nfzs": [[0,0,500,500]], "tzs": [[600,600,700,700]],
                                       "start": {"pos": [100, 100]}})"),
                    ValidationError);
    CHECK_THROWS_AS((void)load_map(R"({"map": [0,0,1000,1000], "tzs": [[600,600,700,700]],
                                       "start": {"pos": [2000, 100]}})"),
                    ValidationError);
    CHECK_THROWS_AS((void)load_map(R"({"map": [0,0,1000,1000], "nfzs": [[0,0,1000,1000]], "tzs": [[1,1,2,2]],
                                       "start": {"pos": [800, 800]}})"),
                    ValidationError);
}
