// covsim command-line entry point: scenario generation, scripted rollouts,
// batch evaluation, SVG rendering and the stdio agent protocol.

#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covsim/config.hpp"
#include "covsim/errors.hpp"
#include "covsim/rollout.hpp"
#include "covsim/server.hpp"
#include "covsim/svg.hpp"

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// "section.key=value" with value parsed as JSON (bare words as strings).
nlohmann::json overrides_to_json(const std::vector<std::string>& sets) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        const auto dot = s.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw covsim::ParseError("--set " + s + ": expected section.key=value");
        }
        const std::string value = s.substr(eq + 1);
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(value);
        } catch (const nlohmann::json::parse_error&) {
            parsed = value;
        }
        j[s.substr(0, dot)][s.substr(dot + 1, eq - dot - 1)] = parsed;
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-world UAV coverage path planning simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    app.add_option("--config", config_path,
                   std::string("JSON config file (default: $") + covsim::kConfigEnvVar + ")");
    app.add_option("--set", sets, "Override one config value, e.g. --set env.max_steps=500")->take_all();

    std::uint64_t seed = 0;
    double difficulty = 0.1;
    std::string out_path;

    auto* gen = app.add_subcommand("generate", "Generate a scenario and write it as a map file");
    gen->add_option("--seed", seed, "Scenario seed")->required();
    gen->add_option("--difficulty", difficulty, "Difficulty in (0, 1]")->required();
    gen->add_option("--out", out_path, "Output map JSON")->required();

    std::string planner_name = "greedy";
    std::string map_path;
    std::string svg_path;
    std::string trace_path;
    std::string report_path;
    auto* roll = app.add_subcommand("rollout", "Run one episode with a scripted planner");
    roll->add_option("--planner", planner_name, "random | greedy")->check(CLI::IsMember({"random", "greedy"}));
    auto* seed_opt = roll->add_option("--seed", seed, "Scenario and planner seed");
    auto* diff_opt = roll->add_option("--difficulty", difficulty, "Difficulty in (0, 1]");
    auto* map_opt = roll->add_option("--map", map_path, "Hand-crafted map file");
    map_opt->excludes(diff_opt);
    seed_opt->needs(diff_opt);
    roll->add_option("--svg", svg_path, "Write an SVG rendering");
    roll->add_option("--trace", trace_path, "Write the full trace JSON");
    roll->add_option("--report", report_path, "Write the report JSON")->required();

    int episodes = 10;
    int jobs = 1;
    auto* ev = app.add_subcommand("eval", "Run many episodes and aggregate");
    ev->add_option("--planner", planner_name, "random | greedy")->required()->check(CLI::IsMember({"random", "greedy"}));
    ev->add_option("--episodes", episodes, "Number of episodes")->required();
    ev->add_option("--difficulty", difficulty, "Difficulty in (0, 1]")->required();
    ev->add_option("--seed", seed, "First seed");
    ev->add_option("--jobs", jobs, "Worker threads (0 = hardware concurrency)");
    ev->add_option("--report", report_path, "Write the aggregate report JSON")->required();

    auto* render = app.add_subcommand("render", "Render a trace file to SVG");
    render->add_option("--trace", trace_path, "Trace JSON written by rollout")->required();
    render->add_option("--svg", svg_path, "Output SVG")->required();

    auto* serve = app.add_subcommand("serve", "Serve the newline-delimited JSON protocol on stdin/stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        covsim::SimConfig cfg = covsim::load_config(config_path);
        if (!sets.empty()) cfg = covsim::apply_config_json(cfg, overrides_to_json(sets));

        if (*gen) {
            const auto scenario = covsim::generate(cfg.scenario_params(), difficulty, seed);
            write_file(out_path, covsim::scenario_to_map_json(scenario).dump(2) + "\n");
        } else if (*roll) {
            covsim::RolloutConfig rc;
            rc.sim = cfg;
            rc.planner = *covsim::planner_from_string(planner_name);
            rc.seed = seed;
            rc.difficulty = difficulty;
            if (*map_opt) {
                rc.map_text = covsim::read_text_file(map_path);
            } else if (!*diff_opt) {
                std::cerr << "rollout: give either --difficulty (with optional --seed) or --map\n";
                return 2;
            }
            const auto result = covsim::run_rollout(rc);
            write_file(report_path, covsim::report_to_json(result.report).dump(2) + "\n");
            if (!trace_path.empty()) write_file(trace_path, covsim::trace_to_json(result.trace).dump() + "\n");
            if (!svg_path.empty()) write_file(svg_path, covsim::render_svg(result.trace));
            std::cout << covsim::report_to_json(result.report).dump() << "\n";
        } else if (*ev) {
            covsim::RolloutConfig rc;
            rc.sim = cfg;
            rc.planner = *covsim::planner_from_string(planner_name);
            rc.seed = seed;
            rc.difficulty = difficulty;
            if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
            const auto reports = covsim::run_eval(rc, episodes, jobs);
            const auto summary = covsim::eval_to_json(reports);
            write_file(report_path, summary.dump(2) + "\n");
            std::cout << "success " << summary["successes"] << "/" << summary["episodes"]
                      << ", violations " << summary["violation_count"] << "\n";
        } else if (*render) {
            const auto trace = covsim::trace_from_json(nlohmann::json::parse(covsim::read_text_file(trace_path)));
            write_file(svg_path, covsim::render_svg(trace));
        } else if (*serve) {
            covsim::serve_stdio(std::cin, std::cout, cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
