#include "diffmpc/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace diffmpc {

double eval_scalar(const ScalarFn& fn, std::span<const double> point) {
    std::vector<ad::Var> args(point.begin(), point.end());
    return fn(args).value();
}

std::vector<double> ad_gradient(const ScalarFn& fn, std::span<const double> point) {
    ad::Tape tape;
    std::vector<ad::Var> args;
    args.reserve(point.size());
    for (double x : point) args.push_back(tape.lift(x));
    const ad::Var y = fn(args);
    if (y.is_constant()) return std::vector<double>(point.size(), 0.0);
    const ad::Gradient g = tape.backward(y);
    std::vector<double> out(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) out[i] = g.wrt(args[i]);
    return out;
}

std::vector<double> fd_gradient(const ScalarFn& fn, std::span<const double> point, double step) {
    std::vector<double> x(point.begin(), point.end());
    std::vector<double> out(point.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + step;
        const double fp = eval_scalar(fn, x);
        x[i] = xi - step;
        const double fm = eval_scalar(fn, x);
        x[i] = xi;
        out[i] = (fp - fm) / (2.0 * step);
    }
    return out;
}

GradCheckReport grad_check(const ScalarFn& fn, std::span<const double> point, double step) {
    GradCheckReport report;
    const std::vector<double> ad = ad_gradient(fn, point);
    const std::vector<double> fd = fd_gradient(fn, point, step);
    report.entries.resize(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        GradCheckEntry& e = report.entries[i];
        e.ad = ad[i];
        e.fd = fd[i];
        const double mag = std::max(std::abs(e.ad), std::abs(e.fd));
        e.rel_err = mag > 0.0 ? std::abs(e.ad - e.fd) / mag : 0.0;
        if (mag > report.magnitude_floor) report.max_rel_err = std::max(report.max_rel_err, e.rel_err);
    }
    return report;
}

}  // namespace diffmpc
