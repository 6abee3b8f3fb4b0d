#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hypctl/boundary.hpp"
#include "hypctl/coefficients.hpp"
#include "hypctl/field.hpp"
#include "hypctl/lyapunov.hpp"
#include "hypctl/scenario.hpp"

namespace hypctl {

inline constexpr double kBlowUpThreshold = 1e12;

/// Largest per-cell transport rate max_{cells, i} sum_k |a_i^(k)| / h_k.
inline double max_transport_rate(const CoefficientSet& coeffs) {
    const auto& g = coeffs.grid;
    double rate = 0;
    for (int i = 0; i < coeffs.n; ++i)
        for (std::size_t c = 0; c < g.cell_count; ++c) {
            double s = 0;
            for (int k = 0; k < g.dim; ++k)
                s += std::abs(coeffs.velocity[i][k].values[c]) / g.spacing[k];
            rate = std::max(rate, s);
        }
    return rate;
}

inline double max_coupling_row_sum(const CoefficientSet& coeffs) {
    double worst = 0;
    for (int i = 0; i < coeffs.n; ++i)
        for (std::size_t c = 0; c < coeffs.grid.cell_count; ++c) {
            double s = 0;
            for (int j = 0; j < coeffs.n; ++j) s += std::abs(coeffs.coupling_at(i, j, c));
            worst = std::max(worst, s);
        }
    return worst;
}

/// Stable explicit step: the transport CFL bound scaled by cfl_factor, further
/// capped at 0.5 / (largest |B| row sum) to keep the explicit source update stable.
inline double cfl_dt(const CoefficientSet& coeffs, double cfl_factor) {
    if (!(cfl_factor > 0 && cfl_factor <= 1)) throw Error("cfl_dt: factor must lie in (0, 1]");
    const double rate = max_transport_rate(coeffs);
    if (!(rate > 0)) throw Error("cfl_dt: all velocities vanish");
    double dt = cfl_factor / rate;
    const double row = max_coupling_row_sum(coeffs);
    if (row > 0) dt = std::min(dt, 0.5 / row);
    return dt;
}

/// One ghost value per (component, boundary face) in the boundary_faces() order.
struct GhostLayer {
    std::vector<std::vector<double>> value;
};

/// Fills the ghost layer from the boundary condition: u_i on controlled faces,
/// 0 on zero faces and zero-gradient extrapolation (copy of the adjacent
/// interior cell) on outflow faces, where no data may be imposed.
inline GhostLayer apply_boundary(const StateField& w, const BoundaryPartition& part,
                                 const ControlSignal& u) {
    if (u.time != w.time)
        throw ControlError("apply_boundary: control signal is stale (t=" +
                           std::to_string(u.time) + " vs state t=" + std::to_string(w.time) + ")");
    GhostLayer ghosts;
    ghosts.value.assign(part.n, std::vector<double>(part.faces.size(), 0.0));
    for (int i = 0; i < part.n; ++i)
        for (std::size_t f = 0; f < part.faces.size(); ++f) {
            switch (part.face_class[i][f]) {
                case FaceClass::Controlled: ghosts.value[i][f] = u.face_value[i][f]; break;
                case FaceClass::Zero: ghosts.value[i][f] = 0.0; break;
                case FaceClass::Outflow:
                    ghosts.value[i][f] = w.comp[i].values[part.faces[f].adjacent_cell];
                    break;
            }
        }
    return ghosts;
}

/// One forward-Euler stage of the dimension-by-dimension first-order upwind
/// scheme with explicit source:
///   w_i <- w_i - dt [ sum_k a_i^(k) D_k^{upwind} w_i + b_i . w ].
/// All axis contributions and the source are combined in a single unsplit
/// stage, which keeps the update exactly linear in (w, ghosts).
inline StateField step(const StateField& w, const CoefficientSet& coeffs, const GhostLayer& ghosts,
                       double dt) {
    const auto& g = w.grid;
    const int n = w.components();
    StateField out(g, n);
    out.time = w.time + dt;
    for (int i = 0; i < n; ++i) {
        const auto& wi = w.comp[i].values;
        auto& oi = out.comp[i].values;
        for (std::size_t c = 0; c < g.cell_count; ++c) {
            double flux = 0;
            for (int k = 0; k < g.dim; ++k) {
                const double a = coeffs.velocity[i][k].values[c];
                const std::size_t s = g.stride[k];
                const int m = g.cells[k];
                const int j = static_cast<int>((c / s) % static_cast<std::size_t>(m));
                if (a >= 0) {
                    const double wm =
                        j > 0 ? wi[c - s] : ghosts.value[i][face_index(g, k, 0, c)];
                    flux += a * (wi[c] - wm) / g.spacing[k];
                } else {
                    const double wp =
                        j < m - 1 ? wi[c + s] : ghosts.value[i][face_index(g, k, 1, c)];
                    flux += a * (wp - wi[c]) / g.spacing[k];
                }
            }
            double src = 0;
            for (int jj = 0; jj < n; ++jj) src += coeffs.coupling_at(i, jj, c) * w.comp[jj].values[c];
            oi[c] = wi[c] - dt * (flux + src);
        }
    }
    if (!out.finite() || out.max_abs() > kBlowUpThreshold)
        throw InstabilityError("step: state blew up at t = " + std::to_string(out.time));
    return out;
}

struct StepReport {
    double t = 0;  // state time the step started from
    double dt = 0;
    double lyapunov = 0;
    double boundary = 0; // B(t) before the step
    double u_max = 0;
    double cfl_number = 0;
    std::vector<double> max_norm; // per component
};

struct RunResult {
    LyapunovTrace trace;
    StateField final_state;
    std::vector<StepReport> reports;
};

/// Closed-loop run: synthesize feedback, verify it, apply boundary data, step,
/// and record the Lyapunov diagnostics every `cadence` steps (plus t = 0 and
/// t = T). Validation failures, control infeasibility and blow-up all throw.
inline RunResult run(const Scenario& sc, int cadence = 10) {
    if (cadence < 1) throw Error("run: cadence must be >= 1");
    const auto validation = validate_scenario(sc);
    if (!validation.pass) throw ValidationError("scenario validation failed: " + validation.summary());

    const double dt_base = cfl_dt(sc.coeffs, sc.cfl_factor);
    const double rate = max_transport_rate(sc.coeffs);
    StateField w = sc.initial;
    w.time = 0.0;

    RunResult out;
    out.trace.fingerprint = sc.fingerprint;
    std::size_t step_idx = 0;
    for (;;) {
        const bool at_end = w.time >= sc.t_final * (1.0 - 1e-12);
        const ControlSignal u = synthesize_control(w, sc.partition, sc.control_mode, sc.theta);
        const ControlReport ctrl = verify_control(u, w, sc.partition);
        if (!ctrl.pass)
            throw ControlError("run: control verification failed at t = " + std::to_string(w.time));

        StepReport srep;
        srep.t = w.time;
        srep.lyapunov = lyapunov_value(w, sc.weights);
        srep.boundary = ctrl.margin;
        srep.u_max = u.u_max;
        srep.max_norm.reserve(sc.n);
        for (int i = 0; i < sc.n; ++i) srep.max_norm.push_back(w.comp[i].max_abs());

        if (step_idx % static_cast<std::size_t>(cadence) == 0 || at_end) {
            TraceSample s;
            s.t = w.time;
            s.lyapunov = srep.lyapunov;
            s.boundary = ctrl.margin;
            s.volume = volume_term(w, sc.coeffs, sc.weights);
            s.source = source_term(w, sc.coeffs, sc.weights);
            s.u_max = u.u_max;
            out.trace.record(s);
        }
        if (at_end) {
            srep.dt = 0;
            out.reports.push_back(std::move(srep));
            break;
        }
        const double dt = std::min(dt_base, sc.t_final - w.time);
        srep.dt = dt;
        srep.cfl_number = dt * rate;
        out.reports.push_back(std::move(srep));

        const GhostLayer ghosts = apply_boundary(w, sc.partition, u);
        w = step(w, sc.coeffs, ghosts, dt);
        ++step_idx;
    }
    out.final_state = std::move(w);
    return out;
}

} // namespace hypctl
