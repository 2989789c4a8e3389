#pragma once

#include <span>
#include <vector>

#include "diffmpc/errors.hpp"

namespace diffmpc {

/// Adam moments and hyperparameters for one decision vector.
struct AdamState {
    int step_count = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState init(std::size_t n, double lr) {
        AdamState s;
        s.first_moment.assign(n, 0.0);
        s.second_moment.assign(n, 0.0);
        s.learning_rate = lr;
        return s;
    }
};

/// One bias-corrected Adam update. Returns the updated state and point.
std::pair<AdamState, std::vector<double>> adam_step(const AdamState& state,
                                                    std::span<const double> point,
                                                    std::span<const double> gradient);

/// Box bounds plus a per-step rate window around the previously applied value.
struct BoxRateConstraint {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> rate_limit;  // per-step maximum absolute change
    std::vector<double> anchor;      // previous applied value
};

/// Project onto box and rate window (box clamp, rate clamp, box clamp again).
/// Throws InfeasibleConstraint when the box and the rate window are disjoint.
std::vector<double> project(std::span<const double> candidate, const BoxRateConstraint& constraint);

/// Componentwise clamp onto [lower, upper].
std::vector<double> project_box(std::span<const double> candidate,
                                std::span<const double> lower,
                                std::span<const double> upper);

/// Learning-rate schedule: constant, or a one-time decay after a cycle count.
struct LrSchedule {
    enum class Kind { None, StepDecay } kind = Kind::None;
    double factor = 1.0;
    int after_cycle = 0;
};

double lr_decay(const LrSchedule& schedule, int cycle, double base_lr);

}  // namespace diffmpc
