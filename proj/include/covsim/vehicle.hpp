#pragma once

#include <array>
#include <numbers>
#include <span>

#include "covsim/bezier.hpp"
#include "covsim/geometry.hpp"

namespace covsim {

inline constexpr double kStandardGravity = 9.80665;

/// Continuity state carried from one segment into the next.
struct UavPose {
    Vec2 position;
    Vec2 direction{1.0, 0.0};  // unit
    double curvature = 0.0;     // 1/m, signed

    [[nodiscard]] constexpr Vec2 normal() const noexcept { return direction.perp(); }
    bool operator==(const UavPose&) const noexcept = default;
};

/// Six components in [-1, 1].
using ActionVec = std::array<double, 6>;

/// Constant-altitude, constant-speed power model P = A / (v cos^2 phi) + B v^3.
struct PowerModel {
    double A = 1130.97;
    double B = 0.01353;
    double v_const = 20.0;                     // m/s
    double phi_max = std::numbers::pi / 4.0;   // rad
    double g = kStandardGravity;
};

struct CameraModel {
    double altitude = 150.0;                   // m
    double view_angle = std::numbers::pi / 2;  // rad
    double frame_period = 1.0;                 // s

    [[nodiscard]] double fov_side() const noexcept;
};

/// Builds the next segment so that position, direction and curvature at
/// u = 0 match `pose`.  `lambda` scales the action into meters.
[[nodiscard]] BezierCurve action_to_curve(const UavPose& pose, const ActionVec& action, double lambda);

/// Steady-turn bank angle for |kappa|.
[[nodiscard]] double roll_angle(double kappa, const PowerModel& model) noexcept;

/// Throws ContractViolation for |phi| >= pi/2.
[[nodiscard]] double power(double phi, const PowerModel& model);

/// Trapezoidal integral of power over densely sampled traversal poses.
[[nodiscard]] double segment_energy(std::span<const TraversalSample> samples, const PowerModel& model);

[[nodiscard]] Rect fov_rect(Vec2 position, const CameraModel& camera) noexcept;

[[nodiscard]] bool action_in_range(const ActionVec& action) noexcept;

}  // namespace covsim
