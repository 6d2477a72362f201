#include "covsim/curriculum.hpp"

#include <algorithm>

#include "covsim/errors.hpp"

namespace covsim {

double next_difficulty(const CurriculumState& state) noexcept {
    return std::clamp(state.progress / state.success_threshold, state.min_difficulty, 1.0);
}

CurriculumState record(const CurriculumState& state, bool success, double difficulty) {
    if (!(difficulty > 0.0 && difficulty <= 1.0)) throw ContractViolation("difficulty must lie in (0, 1]");
    CurriculumState next = state;
    const double s = success ? 1.0 : 0.0;
    next.progress = state.tau * s * difficulty + (1.0 - state.tau) * state.progress;
    return next;
}

void validate(const CurriculumState& state) {
    if (!(state.tau > 0.0 && state.tau <= 1.0)) throw ValidationError("curriculum: tau must lie in (0, 1]");
    if (!(state.success_threshold > 0.0 && state.success_threshold < 1.0)) {
        throw ValidationError("curriculum: success threshold must lie in (0, 1)");
    }
    if (!(state.min_difficulty > 0.0 && state.min_difficulty <= 1.0)) {
        throw ValidationError("curriculum: minimum difficulty must lie in (0, 1]");
    }
    if (!(state.progress >= 0.0 && state.progress <= 1.0)) {
        throw ValidationError("curriculum: progress must lie in [0, 1]");
    }
}

}  // namespace covsim
