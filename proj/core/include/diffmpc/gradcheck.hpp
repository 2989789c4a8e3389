#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "diffmpc/autodiff.hpp"

namespace diffmpc {

/// A scalar function written over Vars. Inputs arrive either tape-traced (AD
/// path) or as constants (plain evaluation); the function must not capture
/// Vars from other tapes.
using ScalarFn = std::function<ad::Var(std::span<const ad::Var>)>;

/// Evaluate fn at a plain point (no tape involved).
double eval_scalar(const ScalarFn& fn, std::span<const double> point);

/// Reverse-mode gradient of fn at point.
std::vector<double> ad_gradient(const ScalarFn& fn, std::span<const double> point);

/// Central finite differences with absolute step per coordinate.
std::vector<double> fd_gradient(const ScalarFn& fn, std::span<const double> point, double step);

struct GradCheckEntry {
    double ad = 0.0;
    double fd = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    /// Largest relative error over coordinates whose magnitude exceeds the floor.
    double max_rel_err = 0.0;
    double magnitude_floor = 1e-8;

    bool pass(double tol) const { return max_rel_err < tol; }
};

/// Compare AD against central finite differences coordinate by coordinate.
GradCheckReport grad_check(const ScalarFn& fn, std::span<const double> point, double step = 1e-6);

}  // namespace diffmpc
