#include "covsim/bezier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

void require_unit_interval(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw ContractViolation("Bezier parameter outside [0,1]: " + std::to_string(u));
    }
}

// Unchecked polynomial forms; the integrator may probe slightly past u = 1.
Vec2 eval_poly(const BezierCurve& c, double u) {
    const double s = 1.0 - u;
    const auto& b = c.points;
    const double s2 = s * s, u2 = u * u;
    return b[0] * (s2 * s2) + b[1] * (4.0 * s2 * s * u) + b[2] * (6.0 * s2 * u2) +
           b[3] * (4.0 * s * u2 * u) + b[4] * (u2 * u2);
}

Vec2 first_poly(const BezierCurve& c, double u) {
    const double s = 1.0 - u;
    const auto& b = c.points;
    // Hodograph: degree-3 curve on 4 (b_{i+1} - b_i).
    return ((b[1] - b[0]) * (s * s * s) + (b[2] - b[1]) * (3.0 * s * s * u) +
            (b[3] - b[2]) * (3.0 * s * u * u) + (b[4] - b[3]) * (u * u * u)) *
           4.0;
}

Vec2 second_poly(const BezierCurve& c, double u) {
    const double s = 1.0 - u;
    const auto& b = c.points;
    return ((b[2] - b[1] * 2.0 + b[0]) * (s * s) + (b[3] - b[2] * 2.0 + b[1]) * (2.0 * s * u) +
            (b[4] - b[3] * 2.0 + b[2]) * (u * u)) *
           12.0;
}

double speed_or_throw(const BezierCurve& c, double u) {
    const double speed = first_poly(c, u).norm();
    if (!(speed > kSpeedEpsilon)) {
        throw DegenerateCurveError("degenerate Bezier derivative at u=" + std::to_string(u));
    }
    return speed;
}

TraversalSample make_sample(const BezierCurve& c, double t, double u) {
    const Vec2 d1 = first_poly(c, u);
    const Vec2 d2 = second_poly(c, u);
    const double speed = d1.norm();
    if (!(speed > kSpeedEpsilon)) {
        throw DegenerateCurveError("degenerate Bezier derivative at u=" + std::to_string(u));
    }
    return TraversalSample{t, u, eval_poly(c, u), d1 / speed,
                           d1.cross(d2) / (speed * speed * speed)};
}

// Classic RK4 on du/dt = v / |p'(u)|.  Where |p'| nearly vanishes (b1 close
// to b0) the slope is close to singular and one step can jump far past the
// true solution; such steps are split in halves until the stage slopes agree.
double rk4_step(const BezierCurve& c, double v, double u, double h, int depth = 0) {
    const auto f = [&](double uu) { return v / speed_or_throw(c, uu); };
    const double k1 = f(u);
    const double k2 = f(u + 0.5 * h * k1);
    const double k3 = f(u + 0.5 * h * k2);
    const double k4 = f(u + h * k3);
    const double lo = std::min({k1, k2, k3, k4}), hi = std::max({k1, k2, k3, k4});
    if (depth < 40 && hi > 2.0 * lo) {
        return rk4_step(c, v, rk4_step(c, v, u, 0.5 * h, depth + 1), 0.5 * h, depth + 1);
    }
    return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

double BezierCurve::control_polygon_length() const noexcept {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) len += (points[i + 1] - points[i]).norm();
    return len;
}

Vec2 evaluate(const BezierCurve& c, double u) {
    require_unit_interval(u);
    return eval_poly(c, u);
}

Derivatives derivatives(const BezierCurve& c, double u) {
    require_unit_interval(u);
    return {first_poly(c, u), second_poly(c, u)};
}

double curvature(const BezierCurve& c, double u) {
    require_unit_interval(u);
    return make_sample(c, 0.0, u).curvature;
}

double polyline_length(const BezierCurve& c, int n_samples) {
    if (n_samples < 2) throw ContractViolation("polyline_length needs n_samples >= 2");
    double len = 0.0;
    Vec2 prev = c.points.front();
    for (int i = 1; i < n_samples; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const Vec2 p = eval_poly(c, u);
        len += (p - prev).norm();
        prev = p;
    }
    return len;
}

Traversal traverse_constant_speed(const BezierCurve& c, double v, double duration, double dt,
                                  std::span<const double> sample_times) {
    if (!(v > 0.0) || !(duration > 0.0) || !(dt > 0.0)) {
        throw ContractViolation("traverse_constant_speed needs v, duration, dt > 0");
    }
    constexpr double kTimeTol = 1e-9;
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const double ts = sample_times[i];
        if (ts < -kTimeTol || ts > duration + kTimeTol || (i > 0 && ts < sample_times[i - 1])) {
            throw ContractViolation("sample times must be nondecreasing within [0, duration]");
        }
    }

    const auto n_full = static_cast<long>(std::floor(duration / dt + kTimeTol));
    const double tail = duration - static_cast<double>(n_full) * dt;
    const long n_steps = n_full + (tail > kTimeTol * dt ? 1 : 0);

    const auto check_overflow = [&](double u, double t) {
        if (u > 1.0 + 1e-12) {
            throw ParameterOverflowError("Bezier parameter reached 1 at t=" + std::to_string(t) +
                                         " s before duration " + std::to_string(duration) + " s");
        }
    };

    Traversal out;
    out.dense.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.at_times.reserve(sample_times.size());

    double u = 0.0;
    double t = 0.0;
    out.dense.push_back(make_sample(c, 0.0, 0.0));
    std::size_t next_sample = 0;

    for (long k = 0; k < n_steps; ++k) {
        const double t_next = (k + 1 == n_steps) ? duration : static_cast<double>(k + 1) * dt;
        const double h = t_next - t;
        // Sample times falling in [t, t_next) are served from the left grid point.
        while (next_sample < sample_times.size() && sample_times[next_sample] < t_next - kTimeTol) {
            const double ts = sample_times[next_sample];
            const double hp = ts - t;
            const double us = hp > kTimeTol ? rk4_step(c, v, u, hp) : u;
            check_overflow(us, ts);
            out.at_times.push_back(make_sample(c, std::max(ts, 0.0), us));
            ++next_sample;
        }
        u = rk4_step(c, v, u, h);
        t = t_next;
        check_overflow(u, t);
        out.dense.push_back(make_sample(c, t, u));
    }
    while (next_sample < sample_times.size()) {
        out.at_times.push_back(out.dense.back());
        out.at_times.back().t = sample_times[next_sample];
        ++next_sample;
    }
    out.final = out.dense.back();
    return out;
}

}  // namespace covsim
