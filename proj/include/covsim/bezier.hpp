#pragma once

#include <array>
#include <span>
#include <vector>

#include "covsim/geometry.hpp"

namespace covsim {

/// Quartic Bézier curve (degree 4, five control points).
struct BezierCurve {
    static constexpr int kDegree = 4;
    std::array<Vec2, kDegree + 1> points{};

    bool operator==(const BezierCurve&) const noexcept = default;

    /// Length of the control polygon; an upper bound on arc length.
    [[nodiscard]] double control_polygon_length() const noexcept;
};

/// Below this |p'(u)| (meters per unit u) a curve is treated as degenerate.
inline constexpr double kSpeedEpsilon = 1e-6;

struct Derivatives {
    Vec2 first;
    Vec2 second;
};

struct TraversalSample {
    double t = 0.0;  // seconds since segment start
    double u = 0.0;
    Vec2 position;
    Vec2 direction;   // unit tangent
    double curvature = 0.0;  // signed, positive = counterclockwise
};

struct Traversal {
    TraversalSample final;
    std::vector<TraversalSample> at_times;  // one per requested sample time
    std::vector<TraversalSample> dense;     // every integrator step, t = 0 .. duration
};

[[nodiscard]] Vec2 evaluate(const BezierCurve& c, double u);
[[nodiscard]] Derivatives derivatives(const BezierCurve& c, double u);

/// Signed curvature (x'y'' - y'x'') / |p'|^3.  Throws DegenerateCurveError
/// when |p'(u)| <= kSpeedEpsilon.
[[nodiscard]] double curvature(const BezierCurve& c, double u);

/// Sum of chords between n_samples uniformly spaced parameter values.
[[nodiscard]] double polyline_length(const BezierCurve& c, int n_samples = 100);

/// Flies the curve at constant Cartesian speed v by integrating
/// du/dt = v / |p'(u)| from u = 0 with fixed-step RK4.  Sample times must be
/// nondecreasing and lie in [0, duration]; off-grid times get a partial step.
/// Throws ParameterOverflowError when u passes 1 before `duration`.
[[nodiscard]] Traversal traverse_constant_speed(const BezierCurve& c, double v, double duration,
                                                double dt, std::span<const double> sample_times = {});

}  // namespace covsim
