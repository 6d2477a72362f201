#include "covsim/vehicle.hpp"

#include <cmath>

#include "covsim/errors.hpp"

namespace covsim {

double CameraModel::fov_side() const noexcept { return 2.0 * altitude * std::tan(0.5 * view_angle); }

BezierCurve action_to_curve(const UavPose& pose, const ActionVec& a, double lambda) {
    constexpr double n = BezierCurve::kDegree;
    const Vec2 dir = pose.direction;
    const Vec2 nrm = pose.normal();

    BezierCurve c;
    auto& b = c.points;
    b[0] = pose.position;
    b[1] = b[0] + dir * (0.5 * (a[0] + 1.0) * lambda);
    const Vec2 lead = b[1] - b[0];
    b[2] = b[1] * 2.0 - b[0] + nrm * (n / (n - 1.0) * pose.curvature * lead.dot(lead)) +
           dir * (a[1] * lambda);
    b[3] = b[0] + (dir * a[2] + nrm * a[3]) * lambda;
    b[4] = b[0] + (dir * a[4] + nrm * a[5]) * lambda;
    return c;
}

double roll_angle(double kappa, const PowerModel& model) noexcept {
    return std::atan(model.v_const * model.v_const * std::abs(kappa) / model.g);
}

double power(double phi, const PowerModel& model) {
    if (!(std::abs(phi) < std::numbers::pi / 2.0)) {
        throw ContractViolation("roll angle must satisfy |phi| < pi/2");
    }
    const double v = model.v_const;
    const double c = std::cos(phi);
    return model.A / (v * c * c) + model.B * v * v * v;
}

double segment_energy(std::span<const TraversalSample> samples, const PowerModel& model) {
    double energy = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double p0 = power(roll_angle(samples[i - 1].curvature, model), model);
        const double p1 = power(roll_angle(samples[i].curvature, model), model);
        energy += 0.5 * (p0 + p1) * (samples[i].t - samples[i - 1].t);
    }
    return energy;
}

Rect fov_rect(Vec2 position, const CameraModel& camera) noexcept {
    return Rect::centered(position, camera.fov_side());
}

bool action_in_range(const ActionVec& action) noexcept {
    for (double x : action) {
        if (!(x >= -1.0 && x <= 1.0)) return false;
    }
    return true;
}

}  // namespace covsim
