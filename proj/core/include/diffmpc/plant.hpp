#pragma once

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "diffmpc/autodiff.hpp"
#include "diffmpc/errors.hpp"

namespace diffmpc {

using ad::Var;

enum class PlantKind { Dynamic, Static };

/// Bounds, prior and regularization weight for the unknown parameter vector.
struct ThetaSpec {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> prior;
    double lambda = 0.0;
};

/// Differentiable plant: dynamics f and measurement h with known parameters
/// owned by the concrete class and unknown parameters passed per call.
/// Static plants have no state; step() is undefined for them.
class Plant {
  public:
    virtual ~Plant() = default;

    virtual PlantKind kind() const = 0;
    virtual int state_dim() const = 0;  // 0 for static plants
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;
    virtual int param_dim() const = 0;
    virtual const ThetaSpec& theta_spec() const = 0;

    /// Next state. Fully traced so gradients flow to x, u and theta.
    virtual std::vector<Var> step(std::span<const Var> x, std::span<const Var> u,
                                  std::span<const Var> theta) const {
        (void)x;
        (void)u;
        (void)theta;
        throw StaticPlantHasNoStep("step called on a static plant");
    }

    /// Measurement. x must be empty iff the plant is static.
    virtual std::vector<Var> measure(std::span<const Var> x, std::span<const Var> u,
                                     std::span<const Var> theta) const = 0;

  protected:
    void check_dims(std::span<const Var> x, std::span<const Var> u, std::span<const Var> theta,
                    bool expect_state) const {
        const std::size_t nx = expect_state ? static_cast<std::size_t>(state_dim()) : 0;
        if (x.size() != nx) throw DimensionMismatch("plant: state dimension mismatch");
        if (u.size() != static_cast<std::size_t>(input_dim()))
            throw DimensionMismatch("plant: input dimension mismatch");
        if (theta.size() != static_cast<std::size_t>(param_dim()))
            throw DimensionMismatch("plant: parameter dimension mismatch");
    }
};

/// States and outputs along a predicted horizon.
struct RolloutResult {
    std::vector<std::vector<Var>> states;   // empty for static plants
    std::vector<std::vector<Var>> outputs;  // one per input (+1 terminal when requested)
};

/// Iterate step/measure over the input sequence. For static plants, maps
/// measure over the inputs independently. When include_terminal is set (only
/// meaningful for dynamic plants) a terminal output h(x_N, u_{N-1}) is
/// appended.
RolloutResult rollout(const Plant& plant, std::span<const Var> x0,
                      std::span<const std::vector<Var>> inputs, std::span<const Var> theta,
                      bool include_terminal = false);

/// Additive measurement noise: zero-mean Gaussian, one sigma for all outputs.
struct NoiseSpec {
    double sigma = 0.0;
};

/// The surrogate physical plant: the same simulator evaluated with the hidden
/// true parameters, plus optional measurement noise.
class TruthPlant {
  public:
    TruthPlant(const Plant& plant, std::vector<double> theta_true, NoiseSpec noise, std::uint64_t seed);

    /// Noisy measurement of the true plant. x is empty for static plants.
    std::vector<double> observe(std::span<const double> u, std::span<const double> x);

    /// Advance the true dynamic plant one step (no noise).
    std::vector<double> advance(std::span<const double> u, std::span<const double> x) const;

    /// Measurement only, no noise.
    std::vector<double> measure_clean(std::span<const double> u, std::span<const double> x) const;

    const std::vector<double>& theta_true() const { return theta_true_; }

  private:
    const Plant& plant_;
    std::vector<double> theta_true_;
    NoiseSpec noise_;
    std::mt19937_64 rng_;
};

// Plain-value helpers: evaluate step/measure through the same Var code path
// with constants (no tape).
std::vector<double> step_values(const Plant& plant, std::span<const double> x,
                                std::span<const double> u, std::span<const double> theta);
std::vector<double> measure_values(const Plant& plant, std::span<const double> x,
                                   std::span<const double> u, std::span<const double> theta);

std::vector<Var> to_vars(std::span<const double> xs);
std::vector<double> values_of(std::span<const Var> xs);

}  // namespace diffmpc
