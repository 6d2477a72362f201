#pragma once

#include <optional>
#include <string_view>

#include "covsim/bezier.hpp"
#include "covsim/geometry.hpp"
#include "covsim/vehicle.hpp"

namespace covsim {

enum class FeasibilityVerdict {
    feasible,
    curvature_violation,
    out_of_map,
    nfz_violation,
    length_too_short,
    length_too_long,
    degenerate_curve,
};

[[nodiscard]] std::string_view to_string(FeasibilityVerdict v) noexcept;
[[nodiscard]] std::optional<FeasibilityVerdict> verdict_from_string(std::string_view s) noexcept;

enum class CheckSpacing { uniform_u, arc_length };

struct FeasibilityConfig {
    int n_check_points = 100;
    double length_min_factor = 2.5;  // times v * T_b
    double length_max_factor = 3.5;
    double kappa_max = 0.0;          // 1/m; see max_curvature_limit
    CheckSpacing spacing = CheckSpacing::uniform_u;
    /// Search for the true |kappa| maximum around each sampled local peak.
    /// Without it a narrow peak between samples can exceed kappa_max
    /// unnoticed.
    bool refine_curvature = true;
};

/// g tan(phi_max) / v^2.
[[nodiscard]] double max_curvature_limit(const PowerModel& model) noexcept;

/// Verdict for an already-built curve.  Checks run in a fixed order and the
/// first failure wins: degenerate, curvature, map/NFZ containment, length.
[[nodiscard]] FeasibilityVerdict check_curve(const Rect& map, const RectSet& nfzs, const BezierCurve& curve,
                                             const FeasibilityConfig& cfg, double v, double segment_time);

[[nodiscard]] FeasibilityVerdict check(const Rect& map, const RectSet& nfzs, const UavPose& pose,
                                       const ActionVec& action, const FeasibilityConfig& cfg, double lambda,
                                       double v, double segment_time);

/// Same answer as check(...) == feasible, but stops at the first failing
/// sample.  Samples are visited coarse-to-fine, so typical rejections cost a
/// handful of evaluations.  Used by the planners' rejection sampling.
[[nodiscard]] bool is_feasible(const Rect& map, const RectSet& nfzs, const UavPose& pose, const ActionVec& action,
                               const FeasibilityConfig& cfg, double lambda, double v, double segment_time);

}  // namespace covsim
