#include "diffmpc/beamline.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace diffmpc::beamline {

Mat4 Mat4::identity() {
    Mat4 out;
    for (int i = 0; i < 4; ++i) out(i, i) = Var(1.0);
    return out;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 out;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            Var acc(0.0);
            for (int k = 0; k < 4; ++k) acc = acc + a(r, k) * b(k, c);
            out(r, c) = acc;
        }
    }
    return out;
}

Mat4 Mat4::transpose() const {
    Mat4 out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out(r, c) = (*this)(c, r);
    return out;
}

double BeamlineLattice::total_length() const {
    double s = 0.0;
    for (const Element& e : elements) s += e.length;
    return s;
}

void BeamlineLattice::validate() const {
    if (elements.empty()) throw ConfigError("lattice: no elements");
    std::set<int> controls;
    for (const Element& e : elements) {
        if (e.length <= 0.0) throw ConfigError("lattice: element length must be > 0");
        if (e.kind == ElementKind::Drift && e.controllable())
            throw ConfigError("lattice: drifts cannot be controllable");
        if (e.controllable()) controls.insert(e.control_index);
    }
    if (controls != std::set<int>{0, 1, 2, 3, 4, 5, 6})
        throw ConfigError("lattice: control indices must be exactly {0..6}, one quad each");
    int prev = -1;
    for (int idx : segment_ends) {
        if (idx <= prev || idx >= static_cast<int>(elements.size()))
            throw ConfigError("lattice: segment_ends must be strictly increasing element indices");
        prev = idx;
    }
    if (segment_ends.back() != static_cast<int>(elements.size()) - 1)
        throw ConfigError("lattice: last segment end must be the last element");
}

namespace {

// cos-like and sin-like terms of the thick quadrupole map as smooth functions
// of the signed strength k: c(k) = cos(sqrt(k) L) for k > 0, cosh for k < 0;
// s(k) = sin(sqrt(k) L)/sqrt(k), sinh analogously. Below |k| = 1e-12 a
// second-order series in k keeps values and partials smooth through k = 0.
std::pair<Var, Var> cos_sin_like(const Var& k, double length) {
    const double kv = k.value();
    const Var L(length);
    constexpr double kSeriesBand = 1e-12;
    if (kv > kSeriesBand) {
        const Var root = ad::sqrt(k);
        const Var psi = root * L;
        return {ad::cos(psi), ad::sin(psi) / root};
    }
    if (kv < -kSeriesBand) {
        const Var root = ad::sqrt(Var(0.0) - k);
        const Var psi = root * L;
        return {ad::cosh(psi), ad::sinh(psi) / root};
    }
    const double L2 = length * length;
    const Var c = Var(1.0) - k * Var(L2 / 2.0) + k * k * Var(L2 * L2 / 24.0);
    const Var s = Var(length) - k * Var(L2 * length / 6.0) + k * k * Var(L2 * L2 * length / 120.0);
    return {c, s};
}

}  // namespace

Mat4 element_matrix(const Element& e, const std::optional<Var>& k_override) {
    Mat4 m = Mat4::identity();
    if (e.kind == ElementKind::Drift) {
        m(0, 1) = Var(e.length);
        m(2, 3) = Var(e.length);
        return m;
    }
    const Var k = k_override ? *k_override : Var(e.strength);
    if (!std::isfinite(k.value())) throw DomainError("quadrupole strength must be finite");

    const auto [cx, sx] = cos_sin_like(k, e.length);
    m(0, 0) = cx;
    m(0, 1) = sx;
    m(1, 0) = Var(0.0) - k * sx;
    m(1, 1) = cx;

    const Var mk = Var(0.0) - k;
    const auto [cy, sy] = cos_sin_like(mk, e.length);
    m(2, 2) = cy;
    m(2, 3) = sy;
    m(3, 2) = Var(0.0) - mk * sy;
    m(3, 3) = cy;
    return m;
}

std::array<SigmaState, 4> propagate_sigma(const BeamlineLattice& lattice, std::span<const Var> u,
                                          std::span<const Var> theta) {
    if (theta.size() != 4) throw DimensionMismatch("propagate_sigma: theta must have 4 components");
    if (u.size() != 7) throw DimensionMismatch("propagate_sigma: u must have 7 components");
    for (const Var& t : theta)
        if (t.value() <= 0.0) throw NonpositiveTheta("propagate_sigma: theta components must be > 0");

    Mat4 sigma;
    for (int i = 0; i < 4; ++i) sigma(i, i) = theta[static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(i)];

    std::array<SigmaState, 4> snapshots;
    std::size_t next_snapshot = 0;
    for (std::size_t i = 0; i < lattice.elements.size(); ++i) {
        const Element& e = lattice.elements[i];
        std::optional<Var> k;
        if (e.controllable()) k = u[static_cast<std::size_t>(e.control_index)];
        const Mat4 r = element_matrix(e, k);
        sigma = r * sigma * r.transpose();
        if (next_snapshot < 4 && static_cast<int>(i) == lattice.segment_ends[next_snapshot]) {
            snapshots[next_snapshot].sigma = sigma;
            ++next_snapshot;
        }
    }
    if (next_snapshot != 4) throw ConfigError("propagate_sigma: lattice has fewer than 4 segment ends");
    return snapshots;
}

std::vector<Var> beam_sizes(std::span<const SigmaState> states) {
    std::vector<Var> out;
    out.reserve(states.size() * 2);
    for (const SigmaState& s : states) {
        out.push_back(ad::sqrt(s.sigma(0, 0)));
        out.push_back(ad::sqrt(s.sigma(2, 2)));
    }
    return out;
}

BeamlineLattice default_lattice() {
    const auto k = default_nominal_setpoints();
    BeamlineLattice lat;
    auto& e = lat.elements;
    // segment a: matching section after extraction
    e.push_back(Element::drift(1.80));
    e.push_back(Element::quad(0.25, k[0], 0));
    e.push_back(Element::drift(1.40));
    e.push_back(Element::quad(0.25, k[1], 1));
    e.push_back(Element::drift(1.40));
    e.push_back(Element::quad(0.25, k[2], 2));
    e.push_back(Element::drift(2.45));
    // segment b: two bends (modeled as drifts) around a single quad
    e.push_back(Element::drift(1.20));
    e.push_back(Element::drift(1.00));
    e.push_back(Element::quad(0.25, k[3], 3));
    e.push_back(Element::drift(1.00));
    e.push_back(Element::drift(1.20));
    e.push_back(Element::drift(1.80));
    // segment c: triplet, ends near a double waist
    e.push_back(Element::quad(0.25, k[4], 4));
    e.push_back(Element::drift(1.60));
    e.push_back(Element::quad(0.25, k[5], 5));
    e.push_back(Element::drift(1.60));
    e.push_back(Element::quad(0.25, k[6], 6));
    e.push_back(Element::drift(2.40));
    e.push_back(Element::drift(1.20));
    // segment d: final transport with two fixed quads and a bend
    e.push_back(Element::drift(1.30));
    e.push_back(Element::quad(0.25, -1.60));
    e.push_back(Element::drift(1.80));
    e.push_back(Element::drift(1.20));
    e.push_back(Element::quad(0.25, 1.70));
    e.push_back(Element::drift(3.40));

    lat.segment_ends = {6, 12, 19, 25};
    lat.validate();
    return lat;
}

std::array<double, 7> default_nominal_setpoints() {
    return {1.43, -2.59, 2.06, -2.93, 1.11, -2.57, 2.32};
}

std::string lattice_to_json(const BeamlineLattice& lattice) {
    nlohmann::json j;
    j["elements"] = nlohmann::json::array();
    for (const Element& e : lattice.elements) {
        nlohmann::json je;
        je["kind"] = e.kind == ElementKind::Drift ? "drift" : "quadrupole";
        je["length"] = e.length;
        if (e.kind == ElementKind::Quadrupole) {
            je["strength"] = e.strength;
            if (e.controllable()) je["control_index"] = e.control_index;
        }
        j["elements"].push_back(je);
    }
    j["segment_ends"] = lattice.segment_ends;
    return j.dump(2);
}

BeamlineLattice lattice_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("lattice: invalid JSON: ") + ex.what());
    }
    BeamlineLattice lat;
    try {
        for (const auto& je : j.at("elements")) {
            const std::string kind = je.at("kind").get<std::string>();
            Element e;
            e.length = je.at("length").get<double>();
            if (kind == "drift") {
                e.kind = ElementKind::Drift;
            } else if (kind == "quadrupole") {
                e.kind = ElementKind::Quadrupole;
                e.strength = je.at("strength").get<double>();
                e.control_index = je.value("control_index", -1);
            } else {
                throw ConfigError("lattice: unknown element kind '" + kind + "'");
            }
            lat.elements.push_back(e);
        }
        const auto ends = j.at("segment_ends").get<std::vector<int>>();
        if (ends.size() != 4) throw ConfigError("lattice: segment_ends must have 4 entries");
        std::copy(ends.begin(), ends.end(), lat.segment_ends.begin());
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("lattice: ") + ex.what());
    }
    lat.validate();
    return lat;
}

BeamlinePlant::BeamlinePlant(BeamlineLattice lattice, ThetaSpec theta)
    : lattice_(std::move(lattice)), theta_(std::move(theta)) {
    lattice_.validate();
}

std::vector<Var> BeamlinePlant::measure(std::span<const Var> x, std::span<const Var> u,
                                        std::span<const Var> theta) const {
    check_dims(x, u, theta, /*expect_state=*/false);
    const auto states = propagate_sigma(lattice_, u, theta);
    return beam_sizes(states);
}

}  // namespace diffmpc::beamline
