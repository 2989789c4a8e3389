#pragma once

#include "diffmpc/plant.hpp"

namespace diffmpc {

/// Damped harmonic oscillator with unknown damping, integrated by RK4:
///   x1' = x2,  x2' = -k x1 - theta x2 + u
/// Measurement is position only, so the velocity must be reconstructed by the
/// observer. The forcing u is held constant across one step.
class OscillatorPlant final : public Plant {
  public:
    OscillatorPlant(double stiffness, double dt, ThetaSpec theta);

    PlantKind kind() const override { return PlantKind::Dynamic; }
    int state_dim() const override { return 2; }
    int input_dim() const override { return 1; }
    int output_dim() const override { return 1; }
    int param_dim() const override { return 1; }
    const ThetaSpec& theta_spec() const override { return theta_; }

    std::vector<Var> step(std::span<const Var> x, std::span<const Var> u,
                          std::span<const Var> theta) const override;
    std::vector<Var> measure(std::span<const Var> x, std::span<const Var> u,
                             std::span<const Var> theta) const override;

    double stiffness() const { return stiffness_; }
    double dt() const { return dt_; }

    static ThetaSpec default_theta_spec();

  private:
    double stiffness_;
    double dt_;
    ThetaSpec theta_;
};

}  // namespace diffmpc
