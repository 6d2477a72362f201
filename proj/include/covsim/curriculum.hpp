#pragma once

namespace covsim {

/// Self-adaptive difficulty schedule driven by a filtered,
/// difficulty-weighted success signal.
struct CurriculumState {
    double progress = 0.0;          // p, starts at 0
    double tau = 0.005;             // filter parameter in (0, 1]
    double success_threshold = 0.8;  // s_th in (0, 1)
    double min_difficulty = 0.1;     // d_min in (0, 1]
};

/// clip(p / s_th, d_min, 1).
[[nodiscard]] double next_difficulty(const CurriculumState& state) noexcept;

/// p <- tau * s * d + (1 - tau) * p.  Throws ContractViolation when
/// difficulty is outside (0, 1].
[[nodiscard]] CurriculumState record(const CurriculumState& state, bool success, double difficulty);

/// Throws ValidationError when a parameter is outside its range.
void validate(const CurriculumState& state);

}  // namespace covsim
