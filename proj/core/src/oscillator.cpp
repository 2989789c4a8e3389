#include "diffmpc/oscillator.hpp"

namespace diffmpc {

OscillatorPlant::OscillatorPlant(double stiffness, double dt, ThetaSpec theta)
    : stiffness_(stiffness), dt_(dt), theta_(std::move(theta)) {
    if (dt_ <= 0.0) throw ConfigError("oscillator: dt must be > 0");
    if (stiffness_ <= 0.0) throw ConfigError("oscillator: stiffness must be > 0");
}

ThetaSpec OscillatorPlant::default_theta_spec() {
    ThetaSpec spec;
    spec.lower = {0.01};
    spec.upper = {5.0};
    spec.prior = {(0.01 + 5.0) / 2.0};
    spec.lambda = 1e-6;
    return spec;
}

namespace {

struct Deriv {
    Var d1, d2;
};

Deriv rhs(const Var& x1, const Var& x2, const Var& u, const Var& damping, double k) {
    return {x2, Var(0.0) - Var(k) * x1 - damping * x2 + u};
}

}  // namespace

std::vector<Var> OscillatorPlant::step(std::span<const Var> x, std::span<const Var> u,
                                       std::span<const Var> theta) const {
    check_dims(x, u, theta, /*expect_state=*/true);
    const Var& x1 = x[0];
    const Var& x2 = x[1];
    const Var& f = u[0];
    const Var& d = theta[0];
    const Var h(dt_);
    const Var half(0.5);

    const Deriv k1 = rhs(x1, x2, f, d, stiffness_);
    const Deriv k2 = rhs(x1 + half * h * k1.d1, x2 + half * h * k1.d2, f, d, stiffness_);
    const Deriv k3 = rhs(x1 + half * h * k2.d1, x2 + half * h * k2.d2, f, d, stiffness_);
    const Deriv k4 = rhs(x1 + h * k3.d1, x2 + h * k3.d2, f, d, stiffness_);

    const Var sixth = h / Var(6.0);
    return {x1 + sixth * (k1.d1 + Var(2.0) * k2.d1 + Var(2.0) * k3.d1 + k4.d1),
            x2 + sixth * (k1.d2 + Var(2.0) * k2.d2 + Var(2.0) * k3.d2 + k4.d2)};
}

std::vector<Var> OscillatorPlant::measure(std::span<const Var> x, std::span<const Var> u,
                                          std::span<const Var> theta) const {
    check_dims(x, u, theta, /*expect_state=*/true);
    return {x[0]};
}

}  // namespace diffmpc
