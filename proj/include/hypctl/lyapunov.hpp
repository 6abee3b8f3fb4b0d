#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hypctl/coefficients.hpp"
#include "hypctl/field.hpp"
#include "hypctl/weights.hpp"

namespace hypctl {

/// L(t) = int_Omega w^T E(mu) w dx by midpoint quadrature. Exactly quadratic
/// in the stored state, which the linearity-based tests rely on.
inline double lyapunov_value(const StateField& w, const WeightField& weights) {
    if (!(w.grid == weights.grid)) throw Error("lyapunov_value: grids differ");
    const double vol = w.grid.cell_volume();
    double acc = 0;
    for (int i = 0; i < w.components(); ++i) {
        const auto& wi = w.comp[i].values;
        const auto& mi = weights.mu[i].values;
        double comp_acc = 0;
        for (std::size_t c = 0; c < wi.size(); ++c)
            comp_acc += wi[c] * wi[c] * std::exp(mi[c]);
        acc += comp_acc;
    }
    return acc * vol;
}

/// Unweighted squared L2 norm sum_i ||w_i||^2 (for the norm-equivalence bounds).
inline double state_norm_squared(const StateField& w) {
    const double vol = w.grid.cell_volume();
    double acc = 0;
    for (const auto& comp : w.comp)
        for (double v : comp.values) acc += v * v;
    return acc * vol;
}

/// Volume term of the Lyapunov balance,
///   I(t) = int w^T [ sum_k (M^(k) A^(k) + d_k A^(k)) E - (B^T E + E B) ] w,
/// evaluated with the same difference stencils as weight_residual so that the
/// sharp-case identity I = -C_L L holds to the residual tolerance.
inline double volume_term(const StateField& w, const CoefficientSet& coeffs,
                          const WeightField& weights) {
    const auto& g = w.grid;
    const double vol = g.cell_volume();
    const int n = w.components();
    std::vector<ScalarField> div;
    div.reserve(n);
    for (int i = 0; i < n; ++i) div.push_back(divergence_a(coeffs, i));
    double acc = 0;
    for (std::size_t c = 0; c < g.cell_count; ++c) {
        double cell = 0;
        for (int i = 0; i < n; ++i) {
            const double wi = w.comp[i].values[c];
            const double ei = std::exp(weights.mu[i].values[c]);
            double adv = 0;
            for (int k = 0; k < g.dim; ++k)
                adv += coeffs.velocity[i][k].values[c] * detail::partial_at(weights.mu[i], c, k);
            cell += wi * wi * (adv + div[i].values[c]) * ei;
            // - w^T (B^T E + E B) w = -2 sum_ij w_i e^{mu_i} B_ij w_j
            double coupling = 0;
            for (int j = 0; j < n; ++j) coupling += coeffs.coupling_at(i, j, c) * w.comp[j].values[c];
            cell -= 2.0 * wi * ei * coupling;
        }
        acc += cell;
    }
    return acc * vol;
}

/// S(t) = -int w^T (B^T E + E B) w; for diagonal B this is -2 sum_i int B_ii w_i^2 e^{mu_i}.
inline double source_term(const StateField& w, const CoefficientSet& coeffs,
                          const WeightField& weights) {
    const double vol = w.grid.cell_volume();
    const int n = w.components();
    double acc = 0;
    for (std::size_t c = 0; c < w.grid.cell_count; ++c)
        for (int i = 0; i < n; ++i) {
            const double wi = w.comp[i].values[c];
            const double ei = std::exp(weights.mu[i].values[c]);
            double coupling = 0;
            for (int j = 0; j < n; ++j) coupling += coeffs.coupling_at(i, j, c) * w.comp[j].values[c];
            acc -= 2.0 * wi * ei * coupling;
        }
    return acc * vol;
}

struct TraceSample {
    double t = 0;
    double lyapunov = 0;      // L(t)
    double boundary = 0;      // B(t)
    double volume = 0;        // I(t)
    double source = 0;        // S(t)
    double u_max = 0;
};

/// Time series of the Lyapunov diagnostics for one run.
struct LyapunovTrace {
    std::vector<TraceSample> samples;
    std::string fingerprint;

    void record(const TraceSample& s) {
        if (!samples.empty() && !(s.t > samples.back().t))
            throw Error("LyapunovTrace: samples must be strictly increasing in t");
        if (s.lyapunov < 0) throw Error("LyapunovTrace: negative Lyapunov value");
        samples.push_back(s);
    }
};

struct DecayFit {
    double rate_on_l = 0;    // fitted rate of L(t) ~ e^{-rate t}
    double rate_on_norm = 0; // half of it: the rate in the state-norm convention
    double log_intercept = 0;
    int samples_used = 0;
};

/// Least-squares slope of -ln L(t) over [t_a, t_b]. L is quadratic in the
/// state, so rate_on_l compares against C_L (Theorem-style dL/dt <= -C_L L)
/// and rate_on_norm against the stability definition's C.
inline DecayFit fit_decay_rate(const LyapunovTrace& trace, double t_a, double t_b) {
    std::vector<double> ts, ls;
    bool saw_zero = false;
    for (const auto& s : trace.samples) {
        if (s.t < t_a || s.t > t_b) continue;
        if (s.lyapunov > 0) {
            ts.push_back(s.t);
            ls.push_back(std::log(s.lyapunov));
        } else {
            saw_zero = true;
        }
    }
    if (ts.size() < 3) {
        if (saw_zero) {
            DecayFit fit;
            fit.rate_on_l = std::numeric_limits<double>::infinity();
            fit.rate_on_norm = std::numeric_limits<double>::infinity();
            return fit; // fully decayed within the window
        }
        throw Error("fit_decay_rate: need at least 3 samples with L > 0 in the window");
    }
    double st = 0, sl = 0, stt = 0, stl = 0;
    const auto n = static_cast<double>(ts.size());
    for (std::size_t q = 0; q < ts.size(); ++q) {
        st += ts[q];
        sl += ls[q];
        stt += ts[q] * ts[q];
        stl += ts[q] * ls[q];
    }
    const double denom = n * stt - st * st;
    if (std::abs(denom) < 1e-300) throw Error("fit_decay_rate: degenerate time window");
    const double slope = (n * stl - st * sl) / denom;
    DecayFit fit;
    fit.rate_on_l = -slope;
    fit.rate_on_norm = -slope / 2.0;
    fit.log_intercept = (sl - slope * st) / n;
    fit.samples_used = static_cast<int>(ts.size());
    return fit;
}

} // namespace hypctl
