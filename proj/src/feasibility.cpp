#include "covsim/feasibility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

constexpr std::array<std::pair<FeasibilityVerdict, std::string_view>, 7> kVerdictNames{{
    {FeasibilityVerdict::feasible, "feasible"},
    {FeasibilityVerdict::curvature_violation, "curvature_violation"},
    {FeasibilityVerdict::out_of_map, "out_of_map"},
    {FeasibilityVerdict::nfz_violation, "nfz_violation"},
    {FeasibilityVerdict::length_too_short, "length_too_short"},
    {FeasibilityVerdict::length_too_long, "length_too_long"},
    {FeasibilityVerdict::degenerate_curve, "degenerate_curve"},
}};

std::vector<double> uniform_params(int n) {
    std::vector<double> us(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) us[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    return us;
}

// Parameters at (approximately) equal arc-length spacing, found by inverting
// a 10x denser chord-length table.
std::vector<double> arc_length_params(const BezierCurve& c, int n) {
    const int dense_n = 10 * (n - 1) + 1;
    std::vector<double> cum(static_cast<std::size_t>(dense_n), 0.0);
    Vec2 prev = c.points.front();
    for (int i = 1; i < dense_n; ++i) {
        const Vec2 p = evaluate(c, static_cast<double>(i) / (dense_n - 1));
        cum[static_cast<std::size_t>(i)] = cum[static_cast<std::size_t>(i - 1)] + (p - prev).norm();
        prev = p;
    }
    const double total = cum.back();
    std::vector<double> us(static_cast<std::size_t>(n));
    std::size_t j = 0;
    for (int i = 0; i < n; ++i) {
        const double target = total * i / (n - 1);
        while (j + 1 < cum.size() - 1 && cum[j + 1] < target) ++j;
        const double seg = cum[j + 1] - cum[j];
        const double frac = seg > 0.0 ? std::clamp((target - cum[j]) / seg, 0.0, 1.0) : 0.0;
        us[static_cast<std::size_t>(i)] = (static_cast<double>(j) + frac) / (dense_n - 1);
    }
    us.front() = 0.0;
    us.back() = 1.0;
    return us;
}

double abs_curvature(const BezierCurve& c, double u) {
    const auto d = derivatives(c, u);
    const double speed = d.first.norm();
    if (!(speed > kSpeedEpsilon)) return std::numeric_limits<double>::infinity();
    return std::abs(d.first.cross(d.second)) / (speed * speed * speed);
}

// Golden-section search for the maximizer of f on [a, b].
template <typename F>
double golden_argmax(F f, double a, double b) {
    constexpr double r = 0.6180339887498949;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-9) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    return f1 > f2 ? x1 : x2;
}

// Largest |kappa| found near sample i: around a sampled curvature peak, and
// around a sampled speed minimum, where near-cusps hide narrow spikes.
double refined_curvature(const BezierCurve& c, std::span<const double> us, std::span<const double> kappas,
                         std::span<const double> speeds, std::size_t i) {
    const std::size_t last = us.size() - 1;
    const double a = us[i == 0 ? 0 : i - 1], b = us[i == last ? last : i + 1];
    double best = 0.0;
    const bool kappa_peak = (i == 0 || kappas[i] >= kappas[i - 1]) && (i == last || kappas[i] >= kappas[i + 1]);
    if (kappa_peak) best = abs_curvature(c, golden_argmax([&](double u) { return abs_curvature(c, u); }, a, b));
    const bool speed_dip = (i == 0 || speeds[i] <= speeds[i - 1]) && (i == last || speeds[i] <= speeds[i + 1]);
    if (speed_dip) {
        const double u0 = golden_argmax([&](double u) { return -derivatives(c, u).first.norm(); }, a, b);
        const double h = 1e-3 * (b - a);
        best = std::max({best, abs_curvature(c, u0),
                         abs_curvature(c, golden_argmax([&](double u) { return abs_curvature(c, u); },
                                                        std::max(a, u0 - h), std::min(b, u0 + h)))});
    }
    return best;
}

// 0, n-1, then midpoints of ever finer halvings.
const std::vector<std::size_t>& coarse_to_fine(std::size_t n) {
    thread_local std::size_t cached_n = 0;
    thread_local std::vector<std::size_t> order;
    if (cached_n == n) return order;
    order.clear();
    std::vector<char> seen(n, 0);
    const auto add = [&](std::size_t i) {
        if (!seen[i]) {
            seen[i] = 1;
            order.push_back(i);
        }
    };
    add(0);
    add(n - 1);
    for (std::size_t step = n - 1; step > 1;) {
        step = (step + 1) / 2;
        for (std::size_t i = step; i < n; i += step) add(i);
    }
    for (std::size_t i = 0; i < n; ++i) add(i);
    cached_n = n;
    return order;
}

}  // namespace

std::string_view to_string(FeasibilityVerdict v) noexcept {
    for (const auto& [verdict, name] : kVerdictNames) {
        if (verdict == v) return name;
    }
    return "unknown";
}

std::optional<FeasibilityVerdict> verdict_from_string(std::string_view s) noexcept {
    for (const auto& [verdict, name] : kVerdictNames) {
        if (name == s) return verdict;
    }
    return std::nullopt;
}

double max_curvature_limit(const PowerModel& model) noexcept {
    return model.g * std::tan(model.phi_max) / (model.v_const * model.v_const);
}

FeasibilityVerdict check_curve(const Rect& map, const RectSet& nfzs, const BezierCurve& curve,
                               const FeasibilityConfig& cfg, double v, double segment_time) {
    if (cfg.n_check_points < 2) throw ContractViolation("n_check_points must be >= 2");

    const int n = cfg.n_check_points;
    const auto us = cfg.spacing == CheckSpacing::arc_length ? arc_length_params(curve, n) : uniform_params(n);

    std::vector<Derivatives> ders(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        ders[i] = derivatives(curve, us[i]);
        if (!(ders[i].first.norm() > kSpeedEpsilon)) return FeasibilityVerdict::degenerate_curve;
    }

    std::vector<double> kappas(ders.size()), speeds(ders.size());
    for (std::size_t i = 0; i < ders.size(); ++i) {
        speeds[i] = ders[i].first.norm();
        kappas[i] = std::abs(ders[i].first.cross(ders[i].second)) / (speeds[i] * speeds[i] * speeds[i]);
        if (kappas[i] > cfg.kappa_max) return FeasibilityVerdict::curvature_violation;
    }
    if (cfg.refine_curvature) {
        for (std::size_t i = 0; i < us.size(); ++i) {
            if (refined_curvature(curve, us, kappas, speeds, i) > cfg.kappa_max) {
                return FeasibilityVerdict::curvature_violation;
            }
        }
    }

    // Most rejections are on curvature, so positions are only evaluated now.
    std::vector<Vec2> points(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) points[i] = evaluate(curve, us[i]);
    for (const auto& p : points) {
        if (!point_in_rect(p, map)) return FeasibilityVerdict::out_of_map;
        for (const auto& nfz : nfzs) {
            if (point_in_rect(p, nfz)) return FeasibilityVerdict::nfz_violation;
        }
    }

    double length = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) length += (points[i] - points[i - 1]).norm();
    const double travel = v * segment_time;
    if (length < cfg.length_min_factor * travel) return FeasibilityVerdict::length_too_short;
    if (length > cfg.length_max_factor * travel) return FeasibilityVerdict::length_too_long;
    return FeasibilityVerdict::feasible;
}

bool is_feasible(const Rect& map, const RectSet& nfzs, const UavPose& pose, const ActionVec& action,
                 const FeasibilityConfig& cfg, double lambda, double v, double segment_time) {
    if (cfg.n_check_points < 2) throw ContractViolation("n_check_points must be >= 2");
    if (cfg.spacing != CheckSpacing::uniform_u) {
        return check(map, nfzs, pose, action, cfg, lambda, v, segment_time) == FeasibilityVerdict::feasible;
    }
    const BezierCurve curve = action_to_curve(pose, action, lambda);
    const auto n = static_cast<std::size_t>(cfg.n_check_points);
    const double last = static_cast<double>(n - 1);
    const auto& order = coarse_to_fine(n);

    for (const std::size_t i : order) {
        const auto d = derivatives(curve, static_cast<double>(i) / last);
        const double speed = d.first.norm();
        if (!(speed > kSpeedEpsilon)) return false;
        if (std::abs(d.first.cross(d.second)) > cfg.kappa_max * speed * speed * speed) return false;
    }
    std::vector<Vec2> points(n);
    for (const std::size_t i : order) {
        const Vec2 p = evaluate(curve, static_cast<double>(i) / last);
        if (!point_in_rect(p, map)) return false;
        for (const auto& nfz : nfzs) {
            if (point_in_rect(p, nfz)) return false;
        }
        points[i] = p;
    }
    double length = 0.0;
    for (std::size_t i = 1; i < n; ++i) length += (points[i] - points[i - 1]).norm();
    const double travel = v * segment_time;
    if (length < cfg.length_min_factor * travel || length > cfg.length_max_factor * travel) return false;
    if (!cfg.refine_curvature) return true;
    // Rare path: rerun the full check for its peak search.
    return check_curve(map, nfzs, curve, cfg, v, segment_time) == FeasibilityVerdict::feasible;
}

FeasibilityVerdict check(const Rect& map, const RectSet& nfzs, const UavPose& pose, const ActionVec& action,
                         const FeasibilityConfig& cfg, double lambda, double v, double segment_time) {
    return check_curve(map, nfzs, action_to_curve(pose, action, lambda), cfg, v, segment_time);
}

}  // namespace covsim
