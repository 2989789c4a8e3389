#include "diffmpc/plant.hpp"

namespace diffmpc {

std::vector<Var> to_vars(std::span<const double> xs) {
    return std::vector<Var>(xs.begin(), xs.end());
}

std::vector<double> values_of(std::span<const Var> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i].value();
    return out;
}

RolloutResult rollout(const Plant& plant, std::span<const Var> x0,
                      std::span<const std::vector<Var>> inputs, std::span<const Var> theta,
                      bool include_terminal) {
    if (inputs.empty()) throw DimensionMismatch("rollout: empty input sequence");

    RolloutResult result;
    if (plant.kind() == PlantKind::Static) {
        result.outputs.reserve(inputs.size());
        for (const auto& u : inputs) result.outputs.push_back(plant.measure({}, u, theta));
        return result;
    }

    std::vector<Var> x(x0.begin(), x0.end());
    result.states.reserve(inputs.size() + 1);
    result.outputs.reserve(inputs.size() + (include_terminal ? 1 : 0));
    result.states.push_back(x);
    for (const auto& u : inputs) {
        result.outputs.push_back(plant.measure(x, u, theta));
        x = plant.step(x, u, theta);
        result.states.push_back(x);
    }
    if (include_terminal) result.outputs.push_back(plant.measure(x, inputs.back(), theta));
    return result;
}

std::vector<double> step_values(const Plant& plant, std::span<const double> x,
                                std::span<const double> u, std::span<const double> theta) {
    return values_of(plant.step(to_vars(x), to_vars(u), to_vars(theta)));
}

std::vector<double> measure_values(const Plant& plant, std::span<const double> x,
                                   std::span<const double> u, std::span<const double> theta) {
    return values_of(plant.measure(to_vars(x), to_vars(u), to_vars(theta)));
}

TruthPlant::TruthPlant(const Plant& plant, std::vector<double> theta_true, NoiseSpec noise,
                       std::uint64_t seed)
    : plant_(plant), theta_true_(std::move(theta_true)), noise_(noise), rng_(seed) {}

std::vector<double> TruthPlant::measure_clean(std::span<const double> u,
                                              std::span<const double> x) const {
    return measure_values(plant_, x, u, theta_true_);
}

std::vector<double> TruthPlant::observe(std::span<const double> u, std::span<const double> x) {
    std::vector<double> y = measure_values(plant_, x, u, theta_true_);
    if (noise_.sigma > 0.0) {
        std::normal_distribution<double> dist(0.0, noise_.sigma);
        for (double& v : y) v += dist(rng_);
    }
    return y;
}

std::vector<double> TruthPlant::advance(std::span<const double> u, std::span<const double> x) const {
    if (plant_.kind() != PlantKind::Dynamic)
        throw StaticPlantHasNoStep("TruthPlant::advance on a static plant");
    return step_values(plant_, x, u, theta_true_);
}

}  // namespace diffmpc
