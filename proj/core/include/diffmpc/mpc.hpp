#pragma once

#include <optional>
#include <span>
#include <vector>

#include "diffmpc/optim.hpp"
#include "diffmpc/plant.hpp"

namespace diffmpc {

/// Piecewise-constant reference: value holds from `from_step` until the next
/// piece starts.
struct ReferencePiece {
    int from_step = 0;
    std::vector<double> value;
};

/// Stage cost selector. TerminalPairTracking drives the last two output
/// coordinates to y_star at every predicted step (static accelerator form);
/// ReferenceTracking penalizes ||y - r_t||^2 + input_weight ||u||^2.
struct StageCost {
    enum class Kind { TerminalPairTracking, ReferenceTracking };
    Kind kind = Kind::TerminalPairTracking;
    std::vector<double> y_star;               // TerminalPairTracking, size 2
    std::vector<ReferencePiece> reference;    // ReferenceTracking
    double input_weight = 0.0;                // ReferenceTracking

    std::vector<double> reference_at(int step) const;
};

struct MpcConfig {
    int horizon = 5;
    StageCost stage;
    double terminal_weight = 0.0;  // weight on the terminal tracking term
    double lambda_smooth = 1e-4;
    double lambda_soft = 0.0;
    std::vector<double> y_max;     // empty disables the soft output penalty
    double adam_lr = 1e-2;
    int adam_iters = 50;
    BoxRateConstraint constraint;  // anchor is the previously applied input
    LrSchedule lr_schedule;
};

/// Candidate input sequence over the horizon, feasible w.r.t. box and rate
/// constraints (including previous_applied -> inputs[0]).
struct HorizonPlan {
    enum class Origin { Cold, ShiftedFromPrevious };
    std::vector<std::vector<double>> inputs;  // horizon x n_u
    Origin origin = Origin::Cold;
    std::vector<double> previous_applied;
};

/// Receding-horizon shift: drop the first input, duplicate the terminal one.
/// The shifted plan's previous_applied is the dropped (now applied) input.
HorizonPlan warm_start_shift(const HorizonPlan& previous);

/// Full MPC objective: normalized stage tracking + terminal term
/// + lambda_smooth * smoothness + lambda_soft * hinge-squared output penalty,
/// traced through the plant rollout. x_hat is empty for static plants.
Var mpc_cost(std::span<const std::vector<Var>> plan, std::span<const Var> u_prev,
             std::span<const Var> x_hat, std::span<const Var> theta_hat, const Plant& plant,
             const MpcConfig& config, int current_step);

struct MpcSolveResult {
    std::vector<double> u_applied;
    HorizonPlan plan;
    std::vector<double> cost_trace;  // objective value at the start of each iteration
};

/// Projected-Adam solve of the horizon problem. The plan is kept feasible at
/// every iterate; the first action of the optimized plan is returned as the
/// input to apply.
MpcSolveResult solve_mpc(std::span<const double> x_hat, std::span<const double> theta_hat,
                         const std::optional<HorizonPlan>& warm, const Plant& plant,
                         const MpcConfig& config, int current_step = 0);

}  // namespace diffmpc
