#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "covsim/environment.hpp"
#include "covsim/rng.hpp"

namespace covsim {

struct CandidateEvaluation {
    ActionVec action{};
    FeasibilityVerdict verdict = FeasibilityVerdict::feasible;
    double new_area = 0.0;  // m^2 the segment's frames would cover
    double energy = 0.0;    // J
    double score = 0.0;     // m^2 / J, feasible candidates only
    double endpoint_distance = 0.0;  // m, segment end to the nearest target rect
};

/// Draws actions uniformly from [-1,1]^6 until one passes the feasibility
/// check.  Throws SamplingExhausted after max_tries draws.
[[nodiscard]] ActionVec sample_feasible_action(const EnvConfig& cfg, const EnvState& state, Rng& rng,
                                               int max_tries = 1000);

/// Scores one feasible action against a copy of the target set.
[[nodiscard]] CandidateEvaluation evaluate_candidate(const EnvConfig& cfg, const EnvState& state,
                                                     const ActionVec& action);

struct GreedyOptions {
    int k_candidates = 64;
    /// Draws allowed per candidate; the step only gives up when the whole
    /// k * max_tries budget yields no feasible action.
    int max_tries = 1000;
    /// Draws used to confirm that a candidate's end pose still has a feasible
    /// follow-up; 0 disables the check.
    int lookahead_tries = 1000;
    /// Segments of follow-up that must be shown to exist; each level keeps
    /// at most `lookahead_branches` feasible follow-ups to recurse into.
    int lookahead_depth = 2;
    int lookahead_branches = 3;
    /// Size of each ActionPool bucket; 0 makes the greedy planner draw
    /// uniformly from the action box.
    int pool_size = 4096;
};

/// Actions that pass the pose-independent checks (degeneracy, curvature,
/// length) for a grid of initial curvatures.  Those checks depend on the
/// pose only through its curvature, and on its sign only by mirror symmetry,
/// so a bucket serves every position and heading.  Buckets are filled lazily
/// by uniform rejection sampling from a fixed seed, so their contents do not
/// depend on the order of use.  Safe to share between threads.
class ActionPool {
public:
    explicit ActionPool(const EnvConfig& cfg, int size = 4096, int buckets = 32);

    /// A uniformly chosen member of the bucket nearest |kappa|, mirrored when
    /// kappa < 0.  Falls back to a uniform draw if the bucket is empty.
    [[nodiscard]] ActionVec draw(double kappa, Rng& rng);

private:
    const std::vector<ActionVec>& bucket(std::size_t b);

    EnvConfig cfg_;
    int size_;
    int n_buckets_;
    std::vector<std::vector<ActionVec>> pools_;
    std::unique_ptr<std::once_flag[]> built_;
};

/// Picks the best of k feasible samples by covered area per joule (ties:
/// lower energy, then lexicographic action).  When no candidate covers new
/// area, picks the one ending closest to a remaining target.  Candidates
/// whose end pose has no sampled feasible follow-up are passed over unless
/// every candidate is such a dead end.
/// `pool`, when given, supplies the candidate proposals; every candidate is
/// still checked against the full feasibility model at the current pose.
[[nodiscard]] ActionVec greedy_plan_step(const EnvConfig& cfg, const EnvState& state, const GreedyOptions& opts,
                                         Rng& rng, ActionPool* pool = nullptr);

/// Candidate indices in preference order under the greedy rule.
[[nodiscard]] std::vector<std::size_t> greedy_order(const std::vector<CandidateEvaluation>& candidates);

/// First element of greedy_order.
[[nodiscard]] std::size_t select_greedy(const std::vector<CandidateEvaluation>& candidates);

enum class PlannerKind { random, greedy };

[[nodiscard]] std::string_view to_string(PlannerKind p) noexcept;
[[nodiscard]] std::optional<PlannerKind> planner_from_string(std::string_view s) noexcept;

}  // namespace covsim
