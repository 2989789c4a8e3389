#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffmpc/autodiff.hpp"
#include "diffmpc/plant.hpp"

namespace diffmpc::beamline {

using ad::Var;

enum class ElementKind { Drift, Quadrupole };

/// One beamline element. Quadrupoles carry a nominal strength; the 7
/// controllable ones (control_index 0..6) are overridden by the setpoint
/// vector at propagation time.
struct Element {
    ElementKind kind = ElementKind::Drift;
    double length = 0.0;        // m
    double strength = 0.0;      // 1/m^2, quadrupoles only
    int control_index = -1;     // 0..6 for controlled quads, -1 otherwise

    bool controllable() const { return control_index >= 0; }

    static Element drift(double length) { return {ElementKind::Drift, length, 0.0, -1}; }
    static Element quad(double length, double strength, int control_index = -1) {
        return {ElementKind::Quadrupole, length, strength, control_index};
    }
};

/// 4x4 matrix of Vars over transverse phase space (x, px, y, py).
struct Mat4 {
    std::array<Var, 16> m{};

    Var& operator()(int r, int c) { return m[static_cast<std::size_t>(r * 4 + c)]; }
    const Var& operator()(int r, int c) const { return m[static_cast<std::size_t>(r * 4 + c)]; }

    static Mat4 identity();
    static Mat4 zero() { return Mat4{}; }

    friend Mat4 operator*(const Mat4& a, const Mat4& b);
    Mat4 transpose() const;
};

/// Second-moment matrix of the beam; symmetric, per-plane PSD.
struct SigmaState {
    Mat4 sigma;
};

struct BeamlineLattice {
    std::vector<Element> elements;
    std::array<int, 4> segment_ends{};  // diagnostic locations a..d

    double total_length() const;
    /// Throws ConfigError when the lattice violates its structural invariants.
    void validate() const;
};

/// Transfer matrix of one element. For controlled quadrupoles the strength is
/// overridden by k_override. The quadrupole map is thick-lens with a series
/// branch below |k| = 1e-12 so the map and its gradient are smooth through
/// k = 0 and equal the drift map in the limit.
Mat4 element_matrix(const Element& e, const std::optional<Var>& k_override = std::nullopt);

/// Propagate Sigma0 = diag(theta_i^2) through the lattice; returns the sigma
/// matrix at each of the four segment ends. Throws NonpositiveTheta unless
/// every theta component is positive.
std::array<SigmaState, 4> propagate_sigma(const BeamlineLattice& lattice, std::span<const Var> u,
                                          std::span<const Var> theta);

/// RMS sizes (sigma_x, sigma_y) at each location, ordered
/// (sx_a, sy_a, sx_b, sy_b, sx_c, sy_c, sx_d, sy_d).
std::vector<Var> beam_sizes(std::span<const SigmaState> states);

/// The deterministic 30 m default lattice: 9 quadrupoles (first 7 controlled,
/// last 2 fixed), bends modeled as drifts, 4 diagnostic segment ends.
BeamlineLattice default_lattice();

/// Nominal setpoints of the 7 controlled quadrupoles in the default lattice.
std::array<double, 7> default_nominal_setpoints();

std::string lattice_to_json(const BeamlineLattice& lattice);
BeamlineLattice lattice_from_json(const std::string& text);

/// Static differentiable plant over a lattice: 7 setpoints in, 8 sizes out,
/// theta = (sigma_x, sigma_px, sigma_y, sigma_py) of the incoming beam.
class BeamlinePlant final : public Plant {
  public:
    BeamlinePlant(BeamlineLattice lattice, ThetaSpec theta);

    PlantKind kind() const override { return PlantKind::Static; }
    int state_dim() const override { return 0; }
    int input_dim() const override { return 7; }
    int output_dim() const override { return 8; }
    int param_dim() const override { return 4; }
    const ThetaSpec& theta_spec() const override { return theta_; }

    std::vector<Var> measure(std::span<const Var> x, std::span<const Var> u,
                             std::span<const Var> theta) const override;

    const BeamlineLattice& lattice() const { return lattice_; }

  private:
    BeamlineLattice lattice_;
    ThetaSpec theta_;
};

}  // namespace diffmpc::beamline
