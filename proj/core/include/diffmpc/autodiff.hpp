#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "diffmpc/errors.hpp"

namespace diffmpc::ad {

class Tape;
class Gradient;

/// Scalar value traced on a Tape, or a free constant (no tape).
///
/// Arithmetic between Vars records nodes on the tape of the non-constant
/// operand; arithmetic between constants folds to a constant without touching
/// any tape, so the same code path evaluates both traced and plain values.
/// Combining Vars from two different tapes throws TapeMismatch.
class Var {
  public:
    Var() : value_(0.0), index_(-1), tape_(nullptr) {}
    Var(double value) : value_(value), index_(-1), tape_(nullptr) {}  // NOLINT: implicit by design

    double value() const { return value_; }
    bool is_constant() const { return tape_ == nullptr; }
    int index() const { return index_; }
    Tape* tape() const { return tape_; }

  private:
    friend class Tape;
    friend class Gradient;
    Var(double value, int index, Tape* tape) : value_(value), index_(index), tape_(tape) {}

    double value_;
    int index_;
    Tape* tape_;
};

/// Adjoints of every tape node reachable from one scalar seed.
class Gradient {
  public:
    /// Sensitivity of the seed w.r.t. `leaf`. Constants and nodes unreachable
    /// from the seed have adjoint 0.
    double wrt(const Var& leaf) const {
        if (leaf.is_constant()) return 0.0;
        if (leaf.tape_ != tape_) throw TapeMismatch("Gradient::wrt: leaf lives on another tape");
        if (leaf.index_ < 0 || static_cast<std::size_t>(leaf.index_) >= adjoints_.size()) return 0.0;
        return adjoints_[static_cast<std::size_t>(leaf.index_)];
    }

    int seed_index() const { return seed_; }
    const std::vector<double>& adjoints() const { return adjoints_; }

  private:
    friend class Tape;
    Gradient(const Tape* tape, int seed, std::vector<double> adjoints)
        : tape_(tape), seed_(seed), adjoints_(std::move(adjoints)) {}

    const Tape* tape_;
    int seed_;
    std::vector<double> adjoints_;
};

/// Append-only record of scalar operations for one reverse-mode sweep.
///
/// Every node's parents have strictly smaller indices, so a single reverse
/// pass in decreasing index order accumulates all adjoints. A Tape and the
/// Vars referring to it are confined to one thread; independent tapes may be
/// used concurrently.
class Tape {
  public:
    Tape() { nodes_.reserve(1024); }

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Record a leaf and return its handle. The value is preserved exactly.
    Var lift(double value) {
        const int idx = push(-1, -1, 0.0, 0.0);
        return Var(value, idx, this);
    }

    std::size_t size() const { return nodes_.size(); }

    /// Drop all nodes. Outstanding Vars from before the reset are invalidated.
    void reset() { nodes_.clear(); }

    /// Reverse sweep from a scalar seed recorded on this tape.
    ///
    /// The seed's adjoint is exactly 1; nodes not reachable from the seed
    /// keep adjoint 0. Calling backward twice yields identical results.
    Gradient backward(const Var& seed) const {
        if (seed.is_constant() || seed.tape_ != this)
            throw SeedNotScalar("backward: seed is not a scalar node on this tape");
        std::vector<double> adj(nodes_.size(), 0.0);
        adj[static_cast<std::size_t>(seed.index_)] = 1.0;
        for (int i = seed.index_; i >= 0; --i) {
            const double a = adj[static_cast<std::size_t>(i)];
            if (a == 0.0) continue;
            const Node& n = nodes_[static_cast<std::size_t>(i)];
            if (n.p0 >= 0) adj[static_cast<std::size_t>(n.p0)] += n.d0 * a;
            if (n.p1 >= 0) adj[static_cast<std::size_t>(n.p1)] += n.d1 * a;
        }
        return Gradient(this, seed.index_, std::move(adj));
    }

  private:
    struct Node {
        int p0, p1;
        double d0, d1;
    };

    int push(int p0, int p1, double d0, double d1) {
        nodes_.push_back(Node{p0, p1, d0, d1});
        return static_cast<int>(nodes_.size()) - 1;
    }

    friend Var detail_record(const Var& a, const Var& b, double value, double da, double db);
    friend Var detail_record(const Var& a, double value, double da);

    std::vector<Node> nodes_;
};

namespace detail {

inline Tape* merge_tapes(const Var& a, const Var& b) {
    Tape* ta = a.tape();
    Tape* tb = b.tape();
    if (ta && tb && ta != tb) throw TapeMismatch("cannot combine Vars from different tapes");
    return ta ? ta : tb;
}

}  // namespace detail

inline Var detail_record(const Var& a, const Var& b, double value, double da, double db) {
    Tape* t = detail::merge_tapes(a, b);
    if (!t) return Var(value);  // constant folding
    const int idx = t->push(a.index(), b.index(), da, db);
    return Var(value, idx, t);
}

inline Var detail_record(const Var& a, double value, double da) {
    Tape* t = a.tape();
    if (!t) return Var(value);
    const int idx = t->push(a.index(), -1, da, 0.0);
    return Var(value, idx, t);
}

// -- arithmetic --------------------------------------------------------------

inline Var operator+(const Var& a, const Var& b) {
    if (a.is_constant() && a.value() == 0.0) return b;
    if (b.is_constant() && b.value() == 0.0) return a;
    return detail_record(a, b, a.value() + b.value(), 1.0, 1.0);
}
inline Var operator-(const Var& a, const Var& b) {
    if (b.is_constant() && b.value() == 0.0) return a;
    return detail_record(a, b, a.value() - b.value(), 1.0, -1.0);
}
inline Var operator*(const Var& a, const Var& b) {
    // 0 * x == 0 and 1 * x == x hold for values and partials alike.
    if (a.is_constant()) {
        if (a.value() == 0.0) return Var(0.0);
        if (a.value() == 1.0) return b;
    }
    if (b.is_constant()) {
        if (b.value() == 0.0) return Var(0.0);
        if (b.value() == 1.0) return a;
    }
    return detail_record(a, b, a.value() * b.value(), b.value(), a.value());
}
inline Var operator/(const Var& a, const Var& b) {
    const double bv = b.value();
    if (bv == 0.0) throw DomainError("division by zero");
    return detail_record(a, b, a.value() / bv, 1.0 / bv, -a.value() / (bv * bv));
}
inline Var operator-(const Var& a) { return detail_record(a, -a.value(), -1.0); }

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

// -- elementary functions ----------------------------------------------------

inline Var sin(const Var& a) { return detail_record(a, std::sin(a.value()), std::cos(a.value())); }
inline Var cos(const Var& a) { return detail_record(a, std::cos(a.value()), -std::sin(a.value())); }
inline Var sinh(const Var& a) {
    return detail_record(a, std::sinh(a.value()), std::cosh(a.value()));
}
inline Var cosh(const Var& a) {
    return detail_record(a, std::cosh(a.value()), std::sinh(a.value()));
}
inline Var exp(const Var& a) {
    const double e = std::exp(a.value());
    return detail_record(a, e, e);
}
inline Var log(const Var& a) {
    if (a.value() <= 0.0) throw DomainError("log of non-positive value");
    return detail_record(a, std::log(a.value()), 1.0 / a.value());
}

/// sqrt with a guarded derivative: the value is the true sqrt(x), but the
/// partial is 0.5 / sqrt(max(x, 1e-30)) so gradients stay finite when beam
/// moments approach zero.
inline Var sqrt(const Var& a) {
    const double x = a.value();
    if (x < 0.0) throw DomainError("sqrt of negative value");
    constexpr double kGuard = 1e-30;
    const double d = 0.5 / std::sqrt(x > kGuard ? x : kGuard);
    return detail_record(a, std::sqrt(x), d);
}

/// x^p for constant exponent p.
inline Var pow(const Var& a, double p) {
    const double x = a.value();
    if (x < 0.0 && p != std::floor(p)) throw DomainError("pow of negative base with non-integer exponent");
    if (x == 0.0 && p < 1.0) throw DomainError("pow at zero with exponent < 1");
    return detail_record(a, std::pow(x, p), p * std::pow(x, p - 1.0));
}

inline Var pow(const Var& a, const Var& b) {
    if (b.is_constant()) return pow(a, b.value());
    const double x = a.value();
    if (x <= 0.0) throw DomainError("pow with traced exponent requires positive base");
    const double v = std::pow(x, b.value());
    return detail_record(a, b, v, b.value() * std::pow(x, b.value() - 1.0), v * std::log(x));
}

/// max(x, c) with subgradient 0 at the kink (the hinge is squared downstream,
/// so the composite gradient is continuous).
inline Var max_with(const Var& a, double c) {
    if (a.value() > c) return detail_record(a, a.value(), 1.0);
    return detail_record(a, c, 0.0);
}

/// Smooth |x|: sqrt(x^2 + eps^2) as a single node.
inline Var abs_smooth(const Var& a, double eps = 1e-12) {
    const double x = a.value();
    const double r = std::sqrt(x * x + eps * eps);
    return detail_record(a, r, x / r);
}

inline Var sq(const Var& a) { return a * a; }

}  // namespace diffmpc::ad
