#include "diffmpc/mpc.hpp"

#include <algorithm>
#include <cmath>

namespace diffmpc {

std::vector<double> StageCost::reference_at(int step) const {
    if (reference.empty()) throw ConfigError("stage cost: empty reference sequence");
    const ReferencePiece* active = &reference.front();
    for (const ReferencePiece& p : reference)
        if (p.from_step <= step) active = &p;
    return active->value;
}

HorizonPlan warm_start_shift(const HorizonPlan& previous) {
    if (previous.inputs.empty()) throw ConfigError("warm_start_shift: empty plan");
    HorizonPlan out;
    out.origin = HorizonPlan::Origin::ShiftedFromPrevious;
    out.previous_applied = previous.inputs.front();
    out.inputs.assign(previous.inputs.begin() + 1, previous.inputs.end());
    out.inputs.push_back(previous.inputs.back());
    return out;
}

namespace {

Var squared_norm(std::span<const Var> a, std::span<const Var> b) {
    Var acc(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Var d = a[i] - b[i];
        acc = acc + d * d;
    }
    return acc;
}

Var tracking_term(const StageCost& stage, std::span<const Var> y, int step) {
    if (stage.kind == StageCost::Kind::TerminalPairTracking) {
        const std::size_t ny = y.size();
        if (ny < 2 || stage.y_star.size() != 2)
            throw ConfigError("terminal-pair stage cost needs >= 2 outputs and y_star of size 2");
        const Var dx = y[ny - 2] - Var(stage.y_star[0]);
        const Var dy = y[ny - 1] - Var(stage.y_star[1]);
        return dx * dx + dy * dy;
    }
    const std::vector<double> r = stage.reference_at(step);
    if (r.size() != y.size()) throw ConfigError("reference dimension disagrees with output dimension");
    Var acc(0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const Var d = y[i] - Var(r[i]);
        acc = acc + d * d;
    }
    return acc;
}

}  // namespace

Var mpc_cost(std::span<const std::vector<Var>> plan, std::span<const Var> u_prev,
             std::span<const Var> x_hat, std::span<const Var> theta_hat, const Plant& plant,
             const MpcConfig& config, int current_step) {
    const int n = static_cast<int>(plan.size());
    if (n == 0) throw ConfigError("mpc_cost: empty plan");
    const bool want_terminal = config.terminal_weight > 0.0 && plant.kind() == PlantKind::Dynamic;
    const RolloutResult rolled = rollout(plant, x_hat, plan, theta_hat, want_terminal);

    Var stage_sum(0.0);
    for (int k = 0; k < n; ++k) {
        const auto& y = rolled.outputs[static_cast<std::size_t>(k)];
        Var term = tracking_term(config.stage, y, current_step + k);
        if (config.stage.kind == StageCost::Kind::ReferenceTracking && config.stage.input_weight > 0.0) {
            Var uu(0.0);
            for (const Var& ui : plan[static_cast<std::size_t>(k)]) uu = uu + ui * ui;
            term = term + Var(config.stage.input_weight) * uu;
        }
        stage_sum = stage_sum + term;
    }
    Var cost = stage_sum / Var(static_cast<double>(n));

    if (want_terminal) {
        const auto& y_terminal = rolled.outputs.back();
        cost = cost + Var(config.terminal_weight) *
                          tracking_term(config.stage, y_terminal, current_step + n);
    }

    if (config.lambda_smooth > 0.0) {
        Var smooth = squared_norm(plan[0], u_prev);
        for (int k = 1; k < n; ++k)
            smooth = smooth + squared_norm(plan[static_cast<std::size_t>(k)],
                                           plan[static_cast<std::size_t>(k - 1)]);
        cost = cost + Var(config.lambda_smooth) * smooth;
    }

    if (config.lambda_soft > 0.0 && !config.y_max.empty()) {
        Var soft(0.0);
        for (int k = 0; k < n; ++k) {
            const auto& y = rolled.outputs[static_cast<std::size_t>(k)];
            if (config.y_max.size() != y.size())
                throw ConfigError("y_max dimension disagrees with output dimension");
            for (std::size_t j = 0; j < y.size(); ++j) {
                const Var excess = ad::max_with(y[j] - Var(config.y_max[j]), 0.0);
                soft = soft + excess * excess;
            }
        }
        cost = cost + Var(config.lambda_soft) * soft;
    }
    return cost;
}

namespace {

std::vector<std::vector<double>> project_plan(const std::vector<std::vector<double>>& plan,
                                              const MpcConfig& config) {
    std::vector<std::vector<double>> out;
    out.reserve(plan.size());
    BoxRateConstraint step_constraint = config.constraint;
    for (const auto& u : plan) {
        out.push_back(project(u, step_constraint));
        step_constraint.anchor = out.back();
    }
    return out;
}

}  // namespace

MpcSolveResult solve_mpc(std::span<const double> x_hat, std::span<const double> theta_hat,
                         const std::optional<HorizonPlan>& warm, const Plant& plant,
                         const MpcConfig& config, int current_step) {
    const std::size_t n_u = static_cast<std::size_t>(plant.input_dim());
    const int horizon = config.horizon;
    if (horizon < 1) throw ConfigError("solve_mpc: horizon must be >= 1");

    HorizonPlan plan;
    if (warm) {
        plan = *warm;
        if (static_cast<int>(plan.inputs.size()) != horizon)
            throw ConfigError("solve_mpc: warm-start horizon disagrees with config");
    } else {
        plan.origin = HorizonPlan::Origin::Cold;
        plan.previous_applied = config.constraint.anchor;
        plan.inputs.assign(static_cast<std::size_t>(horizon), config.constraint.anchor);
    }

    MpcSolveResult result;
    if (config.adam_iters == 0) {
        result.plan = plan;
        result.u_applied = plan.inputs.front();
        return result;
    }

    plan.inputs = project_plan(plan.inputs, config);
    const std::vector<Var> theta_vars = to_vars(theta_hat);
    const std::vector<Var> u_prev_vars = to_vars(config.constraint.anchor);

    const double lr = lr_decay(config.lr_schedule, current_step, config.adam_lr);
    AdamState adam = AdamState::init(static_cast<std::size_t>(horizon) * n_u, lr);

    ad::Tape tape;
    for (int it = 0; it < config.adam_iters; ++it) {
        tape.reset();
        std::vector<std::vector<Var>> plan_vars(plan.inputs.size());
        for (std::size_t k = 0; k < plan.inputs.size(); ++k) {
            plan_vars[k].reserve(n_u);
            for (double v : plan.inputs[k]) plan_vars[k].push_back(tape.lift(v));
        }
        const std::vector<Var> x_vars = to_vars(x_hat);
        const Var cost =
            mpc_cost(plan_vars, u_prev_vars, x_vars, theta_vars, plant, config, current_step);
        result.cost_trace.push_back(cost.value());

        std::vector<double> flat(static_cast<std::size_t>(horizon) * n_u);
        std::vector<double> grad(flat.size(), 0.0);
        for (std::size_t k = 0; k < plan.inputs.size(); ++k)
            for (std::size_t i = 0; i < n_u; ++i) flat[k * n_u + i] = plan.inputs[k][i];
        if (!cost.is_constant()) {
            const ad::Gradient g = tape.backward(cost);
            for (std::size_t k = 0; k < plan.inputs.size(); ++k)
                for (std::size_t i = 0; i < n_u; ++i) grad[k * n_u + i] = g.wrt(plan_vars[k][i]);
        }

        auto [next_state, next_flat] = adam_step(adam, flat, grad);
        adam = std::move(next_state);
        for (std::size_t k = 0; k < plan.inputs.size(); ++k)
            for (std::size_t i = 0; i < n_u; ++i) plan.inputs[k][i] = next_flat[k * n_u + i];
        plan.inputs = project_plan(plan.inputs, config);
    }

    result.plan = plan;
    result.u_applied = plan.inputs.front();
    return result;
}

}  // namespace diffmpc
