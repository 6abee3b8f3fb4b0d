#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypctl/coefficients.hpp"
#include "hypctl/field.hpp"
#include "hypctl/grid.hpp"
#include "hypctl/weights.hpp"

namespace hypctl {

enum class FaceClass : std::uint8_t { Outflow, Controlled, Zero };

/// Per-component classification of every boundary face into the outflow part
/// (a_i.n >= 0, including tangential faces), the controlled inflow part and
/// the homogeneous inflow part, with the face data all surface quadratures use.
struct BoundaryPartition {
    StructuredGrid grid;
    int n = 0;
    std::vector<BoundaryFace> faces;
    std::vector<std::vector<FaceClass>> face_class; // [component][face]
    std::vector<std::vector<double>> speed;         // a_i . n at face centers
    std::vector<std::vector<double>> weight;        // exp(mu_i) at face centers

    bool is_outflow(int i, std::size_t f) const { return face_class[i][f] == FaceClass::Outflow; }
    bool is_controlled(int i, std::size_t f) const {
        return face_class[i][f] == FaceClass::Controlled;
    }
};

/// Per-component selection of controlled faces; nullopt selects every inflow face.
using FaceSelection = std::optional<std::vector<std::size_t>>;

inline BoundaryPartition partition_boundary(const CoefficientSet& coeffs,
                                            const WeightField& weights,
                                            std::span<const FaceSelection> selection = {}) {
    if (weights.components() != coeffs.n)
        throw Error("partition_boundary: weight/coefficient component mismatch");
    BoundaryPartition part;
    part.grid = coeffs.grid;
    part.n = coeffs.n;
    part.faces = boundary_faces(coeffs.grid);
    part.face_class.assign(part.n, std::vector<FaceClass>(part.faces.size(), FaceClass::Outflow));
    part.speed.assign(part.n, std::vector<double>(part.faces.size(), 0.0));
    part.weight.assign(part.n, std::vector<double>(part.faces.size(), 1.0));

    for (int i = 0; i < part.n; ++i) {
        for (std::size_t f = 0; f < part.faces.size(); ++f) {
            const double an = coeffs.normal_speed(i, part.faces[f]);
            part.speed[i][f] = an;
            part.weight[i][f] = std::exp(weights.face_mu[i][f]);
            if (an >= 0) {
                part.face_class[i][f] = FaceClass::Outflow;
            } else if (i < static_cast<int>(selection.size()) && selection[i].has_value()) {
                part.face_class[i][f] = FaceClass::Zero; // selected faces promoted below
            } else {
                part.face_class[i][f] = FaceClass::Controlled; // default: all inflow controlled
            }
        }
        if (i < static_cast<int>(selection.size()) && selection[i].has_value()) {
            for (std::size_t f : *selection[i]) {
                if (f >= part.faces.size())
                    throw Error("partition_boundary: face id out of range");
                if (part.speed[i][f] >= 0)
                    throw ValidationError(
                        "partition_boundary: face " + std::to_string(f) +
                        " is outflow for component " + std::to_string(i + 1) +
                        "; control on the outflow boundary is not admissible");
                part.face_class[i][f] = FaceClass::Controlled;
            }
        }
    }
    return part;
}

/// Boundary trace of w_i on a face: the adjacent interior cell value (the
/// upwinded trace, consistent with the zero-gradient outflow ghost).
inline double face_trace(const StateField& w, const BoundaryPartition& part, int i,
                         std::size_t f) {
    return w.comp[i].values[part.faces[f].adjacent_cell];
}

/// sum_i int_{Gamma_i^+} w_i^2 (a_i.n) exp(mu_i)  (midpoint surface quadrature).
/// Nonnegative because a_i.n >= 0 on every outflow face.
inline double outflow_functional(const StateField& w, const BoundaryPartition& part) {
    double acc = 0;
    for (int i = 0; i < part.n; ++i)
        for (std::size_t f = 0; f < part.faces.size(); ++f)
            if (part.is_outflow(i, f)) {
                const double tr = face_trace(w, part, i, f);
                acc += tr * tr * part.speed[i][f] * part.weight[i][f] * part.faces[f].area;
            }
    return acc;
}

/// Control authority of the partition:
///   G = -( sum_i int_{C_i} (a_i.n) exp(mu_i) )^{-1} > 0.
inline double control_gain(const BoundaryPartition& part) {
    double acc = 0;
    for (int i = 0; i < part.n; ++i)
        for (std::size_t f = 0; f < part.faces.size(); ++f)
            if (part.is_controlled(i, f))
                acc += part.speed[i][f] * part.weight[i][f] * part.faces[f].area;
    if (!(acc < 0))
        throw ControlError("control_gain: no control authority (empty controlled inflow set)");
    return -1.0 / acc;
}

enum class ControlMode { PerFace, PerComponent, SingleScalar, SharpEquality };

inline const char* to_string(ControlMode m) {
    switch (m) {
        case ControlMode::PerFace: return "per-face";
        case ControlMode::PerComponent: return "per-component";
        case ControlMode::SingleScalar: return "single-scalar";
        case ControlMode::SharpEquality: return "sharp-equality";
    }
    return "?";
}

/// Feedback boundary data on the controlled faces at one instant.
struct ControlSignal {
    ControlMode mode = ControlMode::SingleScalar;
    double time = 0;
    std::vector<std::vector<double>> face_value; // [component][face], 0 off C_i
    double u_max = 0;
};

struct ControlReport {
    double lhs = 0;    // -sum_i int_{C_i} u_i^2 (a_i.n) exp(mu_i)
    double rhs = 0;    // outflow functional
    double margin = 0; // rhs - lhs; equals the boundary term B(t)
    bool pass = false;
};

/// Verbatim check of the feedback inequality; pass tolerance is relative to
/// the outflow side.
inline ControlReport verify_control(const ControlSignal& u, const StateField& w,
                                    const BoundaryPartition& part) {
    ControlReport rep;
    rep.rhs = outflow_functional(w, part);
    for (int i = 0; i < part.n; ++i)
        for (std::size_t f = 0; f < part.faces.size(); ++f)
            if (part.is_controlled(i, f)) {
                const double ui = u.face_value[i][f];
                rep.lhs -= ui * ui * part.speed[i][f] * part.weight[i][f] * part.faces[f].area;
            }
    rep.margin = rep.rhs - rep.lhs;
    rep.pass = rep.margin >= -1e-12 * (std::abs(rep.rhs) + 1.0);
    return rep;
}

/// Boundary term of the Lyapunov balance,
///   B(t) = sum_i int_{Gamma_i^+} w_i^2 (a.n) e^mu + sum_i int_{C_i} u_i^2 (a.n) e^mu,
/// which equals the margin of verify_control.
inline double boundary_term(const StateField& w, const BoundaryPartition& part,
                            const ControlSignal& u) {
    return verify_control(u, w, part).margin;
}

/// Synthesizes feedback controls satisfying the boundary inequality with
/// safety factor theta (theta = 1 reproduces the sharp equality):
///   u^2 = theta * G * outflow_functional(w)
/// distributed so that the controlled-side integral meets the budget exactly.
/// The distribution rule (budget proportional to |a_i.n| exp(mu_i) area) makes
/// u^2 uniform across all controlled faces; the modes differ in which signal
/// shape (scalar, per component, per face) carries that value.
inline ControlSignal synthesize_control(const StateField& w, const BoundaryPartition& part,
                                        ControlMode mode, double theta = 1.0) {
    if (mode == ControlMode::SharpEquality) theta = 1.0;
    if (!(theta > 0.0 && theta <= 1.0))
        throw ControlError("synthesize_control: safety factor must be in (0, 1]");
    ControlSignal u;
    u.mode = mode;
    u.time = w.time;
    u.face_value.assign(part.n, std::vector<double>(part.faces.size(), 0.0));

    const double flux_out = outflow_functional(w, part);
    if (flux_out == 0.0) return u; // zero state needs zero control
    const double gain = control_gain(part);
    const double u_sq = theta * gain * flux_out;
    if (!(u_sq >= 0)) throw Error("synthesize_control: negative radicand (internal)");
    const double uv = std::sqrt(u_sq);
    for (int i = 0; i < part.n; ++i)
        for (std::size_t f = 0; f < part.faces.size(); ++f)
            if (part.is_controlled(i, f)) u.face_value[i][f] = uv;
    u.u_max = uv;

    const auto rep = verify_control(u, w, part);
    if (!rep.pass)
        throw ControlError("synthesize_control: synthesized signal failed verification "
                           "(margin " + std::to_string(rep.margin) + ")");
    return u;
}

} // namespace hypctl
