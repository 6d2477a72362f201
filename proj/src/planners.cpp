#include "covsim/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

constexpr double kAreaEpsilon = 1e-9;  // m^2

ActionVec draw_action(Rng& rng) {
    ActionVec a{};
    for (auto& x : a) x = rng.uniform(-1.0, 1.0);
    return a;
}

double nearest_target_distance(Vec2 p, const RectSet& tzs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : tzs) best = std::min(best, distance_to_rect(p, r));
    return best;
}

// True when a should be preferred over b at equal primary score.
bool tie_break(const CandidateEvaluation& a, const CandidateEvaluation& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.action < b.action;
}

CandidateEvaluation evaluate_outcome(const EnvState& state, const ActionVec& action, const SegmentOutcome& seg) {
    CandidateEvaluation ev;
    ev.action = action;
    ev.verdict = seg.verdict;
    if (seg.verdict != FeasibilityVerdict::feasible) return ev;
    ev.new_area = std::max(0.0, state.tzs.area() - seg.tzs_after.area());
    ev.energy = seg.energy;
    ev.score = ev.new_area / ev.energy;
    ev.endpoint_distance = nearest_target_distance(seg.end_pose.position, state.tzs);
    return ev;
}

// How many further feasible segments (up to `depth`) could be chained from
// `pose` by sampling.
ActionVec propose(const UavPose& pose, Rng& rng, ActionPool* pool) {
    return pool ? pool->draw(pose.curvature, rng) : draw_action(rng);
}

int escape_depth(const EnvConfig& cfg, const Scenario& sc, const UavPose& pose, const GreedyOptions& opts, int depth,
                 Rng& rng, ActionPool* pool) {
    if (depth == 0) return 0;
    const FeasibilityConfig fcfg = cfg.resolved_feasibility();
    int best = 0;
    int branches = 0;
    for (int t = 0; t < opts.lookahead_tries && branches < opts.lookahead_branches; ++t) {
        const ActionVec a = propose(pose, rng, pool);
        if (!is_feasible(sc.map, sc.nfzs, pose, a, fcfg, cfg.lambda, cfg.power.v_const, cfg.segment_time)) continue;
        if (depth == 1) return 1;
        ++branches;
        const Traversal tr = traverse_constant_speed(action_to_curve(pose, a, cfg.lambda), cfg.power.v_const,
                                                     cfg.segment_time, cfg.dt);
        const UavPose next{tr.final.position, tr.final.direction, tr.final.curvature};
        best = std::max(best, 1 + escape_depth(cfg, sc, next, opts, depth - 1, rng, pool));
        if (best == depth) break;
    }
    return best;
}

}  // namespace

ActionVec sample_feasible_action(const EnvConfig& cfg, const EnvState& state, Rng& rng, int max_tries) {
    if (max_tries < 1) throw ContractViolation("max_tries must be >= 1");
    const FeasibilityConfig fcfg = cfg.resolved_feasibility();
    for (int i = 0; i < max_tries; ++i) {
        const ActionVec a = draw_action(rng);
        if (is_feasible(state.scenario.map, state.scenario.nfzs, state.pose, a, fcfg, cfg.lambda, cfg.power.v_const,
                        cfg.segment_time)) {
            return a;
        }
    }
    throw SamplingExhausted("no feasible action in " + std::to_string(max_tries) + " draws");
}

CandidateEvaluation evaluate_candidate(const EnvConfig& cfg, const EnvState& state, const ActionVec& action) {
    return evaluate_outcome(state, action,
                            simulate_segment(cfg, state.scenario, state.pose, state.tzs, state.frame_phase, action));
}

std::vector<std::size_t> greedy_order(const std::vector<CandidateEvaluation>& candidates) {
    const bool any_coverage = std::any_of(candidates.begin(), candidates.end(),
                                          [](const auto& c) { return c.new_area > kAreaEpsilon; });
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const auto& a = candidates[i];
        const auto& b = candidates[j];
        if (any_coverage) {
            if (a.score != b.score) return a.score > b.score;
        } else if (a.endpoint_distance != b.endpoint_distance) {
            return a.endpoint_distance < b.endpoint_distance;
        }
        return tie_break(a, b);
    });
    return order;
}

std::size_t select_greedy(const std::vector<CandidateEvaluation>& candidates) {
    if (candidates.empty()) throw ContractViolation("select_greedy needs at least one candidate");
    return greedy_order(candidates).front();
}

ActionVec greedy_plan_step(const EnvConfig& cfg, const EnvState& state, const GreedyOptions& opts, Rng& rng,
                           ActionPool* pool) {
    if (opts.k_candidates < 1 || opts.max_tries < 1 || opts.lookahead_tries < 0) {
        throw ContractViolation("greedy options: k_candidates, max_tries >= 1 and lookahead_tries >= 0");
    }
    const FeasibilityConfig fcfg = cfg.resolved_feasibility();
    const auto feasible_from = [&](const UavPose& pose, const ActionVec& a) {
        return is_feasible(state.scenario.map, state.scenario.nfzs, pose, a, fcfg, cfg.lambda, cfg.power.v_const,
                           cfg.segment_time);
    };

    std::vector<CandidateEvaluation> candidates;
    std::vector<UavPose> end_poses;
    const long budget = static_cast<long>(opts.k_candidates) * opts.max_tries;
    for (long draw = 0; draw < budget && static_cast<int>(candidates.size()) < opts.k_candidates; ++draw) {
        const ActionVec a = propose(state.pose, rng, pool);
        if (!feasible_from(state.pose, a)) continue;
        const SegmentOutcome seg =
            simulate_segment(cfg, state.scenario, state.pose, state.tzs, state.frame_phase, a);
        candidates.push_back(evaluate_outcome(state, a, seg));
        end_poses.push_back(seg.end_pose);
    }
    if (candidates.empty()) {
        throw SamplingExhausted("no feasible action in " + std::to_string(budget) + " draws");
    }

    const auto order = greedy_order(candidates);
    if (opts.lookahead_tries == 0 || opts.lookahead_depth == 0) return candidates[order.front()].action;
    // Best-ranked candidate with a full-depth escape; failing that, the one
    // whose escape reaches furthest.
    std::size_t fallback = order.front();
    int fallback_depth = -1;
    for (const std::size_t i : order) {
        // A segment that covers the last target needs no follow-up.
        if (candidates[i].new_area > 0.0 && candidates[i].new_area >= state.tzs.area() - kAreaEpsilon) {
            return candidates[i].action;
        }
        const int d = escape_depth(cfg, state.scenario, end_poses[i], opts, opts.lookahead_depth, rng, pool);
        if (d == opts.lookahead_depth) return candidates[i].action;
        if (d > fallback_depth) {
            fallback = i;
            fallback_depth = d;
        }
    }
    return candidates[fallback].action;
}

ActionPool::ActionPool(const EnvConfig& cfg, int size, int buckets)
    : cfg_(cfg),
      size_(size),
      n_buckets_(buckets),
      pools_(static_cast<std::size_t>(buckets) + 1),
      built_(std::make_unique<std::once_flag[]>(static_cast<std::size_t>(buckets) + 1)) {
    if (size < 1 || buckets < 1) throw ContractViolation("ActionPool needs size >= 1 and buckets >= 1");
}

const std::vector<ActionVec>& ActionPool::bucket(std::size_t b) {
    std::call_once(built_[b], [&] {
        constexpr std::uint64_t kPoolStream = 0x504F4F4CULL;
        constexpr long kDrawsPerMember = 20000;
        const double kmax = cfg_.kappa_max();
        const UavPose origin{{0.0, 0.0}, {1.0, 0.0}, kmax * static_cast<double>(b) / n_buckets_};
        const Rect unbounded{-1e12, -1e12, 1e12, 1e12};
        const FeasibilityConfig fcfg = cfg_.resolved_feasibility();
        Rng rng = Rng::derive(kPoolStream, b);
        auto& out = pools_[b];
        for (long draw = 0; draw < kDrawsPerMember * size_ && static_cast<int>(out.size()) < size_; ++draw) {
            const ActionVec a = draw_action(rng);
            if (is_feasible(unbounded, {}, origin, a, fcfg, cfg_.lambda, cfg_.power.v_const, cfg_.segment_time)) {
                out.push_back(a);
            }
        }
    });
    return pools_[b];
}

ActionVec ActionPool::draw(double kappa, Rng& rng) {
    const double kmax = cfg_.kappa_max();
    const double frac = kmax > 0.0 ? std::min(std::abs(kappa) / kmax, 1.0) : 0.0;
    const auto b = static_cast<std::size_t>(std::lround(frac * n_buckets_));
    const auto& pool = bucket(b);
    if (pool.empty()) return draw_action(rng);
    ActionVec a = pool[static_cast<std::size_t>(rng.next_u64() % pool.size())];
    if (kappa < 0.0) {
        a[3] = -a[3];
        a[5] = -a[5];
    }
    return a;
}

std::string_view to_string(PlannerKind p) noexcept { return p == PlannerKind::random ? "random" : "greedy"; }

std::optional<PlannerKind> planner_from_string(std::string_view s) noexcept {
    if (s == "random") return PlannerKind::random;
    if (s == "greedy") return PlannerKind::greedy;
    return std::nullopt;
}

}  // namespace covsim
