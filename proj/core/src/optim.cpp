#include "diffmpc/optim.hpp"

#include <algorithm>
#include <cmath>

namespace diffmpc {

std::pair<AdamState, std::vector<double>> adam_step(const AdamState& state,
                                                    std::span<const double> point,
                                                    std::span<const double> gradient) {
    const std::size_t n = point.size();
    if (gradient.size() != n || state.first_moment.size() != n || state.second_moment.size() != n)
        throw LengthMismatch("adam_step: point/gradient/moment lengths disagree");

    AdamState s = state;
    s.step_count = state.step_count + 1;
    const double b1 = s.beta1;
    const double b2 = s.beta2;
    const double bc1 = 1.0 - std::pow(b1, s.step_count);
    const double bc2 = 1.0 - std::pow(b2, s.step_count);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = gradient[i];
        s.first_moment[i] = b1 * s.first_moment[i] + (1.0 - b1) * g;
        s.second_moment[i] = b2 * s.second_moment[i] + (1.0 - b2) * g * g;
        const double mhat = s.first_moment[i] / bc1;
        const double vhat = s.second_moment[i] / bc2;
        out[i] = point[i] - s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon);
    }
    return {std::move(s), std::move(out)};
}

std::vector<double> project(std::span<const double> candidate, const BoxRateConstraint& c) {
    const std::size_t n = candidate.size();
    if (c.lower.size() != n || c.upper.size() != n || c.rate_limit.size() != n || c.anchor.size() != n)
        throw LengthMismatch("project: constraint lengths disagree with candidate");

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rlo = c.anchor[i] - c.rate_limit[i];
        const double rhi = c.anchor[i] + c.rate_limit[i];
        if (std::max(c.lower[i], rlo) > std::min(c.upper[i], rhi))
            throw InfeasibleConstraint("project: box and rate window are disjoint");
        double v = std::clamp(candidate[i], c.lower[i], c.upper[i]);
        v = std::clamp(v, rlo, rhi);
        v = std::clamp(v, c.lower[i], c.upper[i]);
        out[i] = v;
    }
    return out;
}

std::vector<double> project_box(std::span<const double> candidate,
                                std::span<const double> lower,
                                std::span<const double> upper) {
    const std::size_t n = candidate.size();
    if (lower.size() != n || upper.size() != n)
        throw LengthMismatch("project_box: bound lengths disagree with candidate");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(candidate[i], lower[i], upper[i]);
    return out;
}

double lr_decay(const LrSchedule& schedule, int cycle, double base_lr) {
    switch (schedule.kind) {
        case LrSchedule::Kind::None:
            return base_lr;
        case LrSchedule::Kind::StepDecay:
            return cycle >= schedule.after_cycle ? base_lr * schedule.factor : base_lr;
    }
    return base_lr;
}

}  // namespace diffmpc
