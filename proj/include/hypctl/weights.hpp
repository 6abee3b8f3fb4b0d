#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypctl/coefficients.hpp"
#include "hypctl/detail/interp.hpp"
#include "hypctl/detail/scatter.hpp"
#include "hypctl/field.hpp"
#include "hypctl/grid.hpp"

namespace hypctl {

// exp(mu) must stay inside double range; weights beyond this are rejected.
inline constexpr double kMaxWeightExponent = 700.0;

/// Lyapunov weight mu_i for one component: cell values, boundary-face values
/// (used by all surface quadratures), its decay constant and the residual the
/// producing route measured against its declared tolerance.
struct WeightComponent {
    ScalarField mu;
    std::vector<double> face_values;
    double c_l = 0;
    double residual_max = std::numeric_limits<double>::quiet_NaN();
    double residual_tol = std::numeric_limits<double>::quiet_NaN();
};

struct WeightField {
    StructuredGrid grid;
    std::vector<ScalarField> mu;
    std::vector<std::vector<double>> face_mu;
    std::vector<double> c_l;
    std::vector<double> residual_max;
    std::vector<double> residual_tol;

    int components() const { return static_cast<int>(mu.size()); }

    double c_l_min() const {
        double m = std::numeric_limits<double>::infinity();
        for (double v : c_l) m = std::min(m, v);
        return m;
    }

    double mu_min() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& f : mu)
            for (double v : f.values) m = std::min(m, v);
        return m;
    }

    double mu_max() const {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& f : mu)
            for (double v : f.values) m = std::max(m, v);
        return m;
    }
};

inline WeightField assemble_weights(std::vector<WeightComponent> comps) {
    if (comps.empty()) throw Error("assemble_weights: no components");
    WeightField w;
    w.grid = comps.front().mu.grid;
    for (auto& c : comps) {
        if (!(c.mu.grid == w.grid)) throw Error("assemble_weights: mixed grids");
        if (!(c.c_l > 0)) throw ValidationError("weights: C_L must be > 0");
        for (double v : c.mu.values)
            if (!std::isfinite(v) || std::abs(v) > kMaxWeightExponent)
                throw ValidationError("weights: |mu| exceeds exp-safe bound 700; scenario rejected");
        for (double v : c.face_values)
            if (!std::isfinite(v) || std::abs(v) > kMaxWeightExponent)
                throw ValidationError("weights: |mu| exceeds exp-safe bound 700 on a boundary face");
        w.mu.push_back(std::move(c.mu));
        w.face_mu.push_back(std::move(c.face_values));
        w.c_l.push_back(c.c_l);
        w.residual_max.push_back(c.residual_max);
        w.residual_tol.push_back(c.residual_tol);
    }
    return w;
}

/// Builds a WeightField from analytic mu callables (cells and faces sampled
/// exactly). Residuals are left unmeasured; scenario validation recomputes them.
inline WeightField weight_field_from_function(
    const StructuredGrid& grid, int n,
    const std::function<double(int, std::span<const double>)>& mu_fn, std::span<const double> c_l) {
    const auto faces = boundary_faces(grid);
    std::vector<WeightComponent> comps(n);
    for (int i = 0; i < n; ++i) {
        comps[i].mu = sample_field(grid, [&](std::span<const double> x) { return mu_fn(i, x); });
        comps[i].face_values.reserve(faces.size());
        for (const auto& f : faces) comps[i].face_values.push_back(mu_fn(i, f.center));
        comps[i].c_l = c_l[static_cast<std::size_t>(i)];
    }
    return assemble_weights(std::move(comps));
}

struct ResidualReport {
    ScalarField cellwise;
    double max_norm = 0;
    double l2_norm = 0;
};

/// Pointwise defect of the weight transport equation:
///   r = a_i . grad(mu_i) + div(a_i) + D_ii + C_L^(i),
/// with the shared central/one-sided difference stencils.
inline ResidualReport weight_residual(const ScalarField& mu, const CoefficientSet& coeffs, int i,
                                      const ScalarField& dissipation, double c_l) {
    if (!(mu.grid == coeffs.grid)) throw Error("weight_residual: field grids differ");
    const auto div = divergence_a(coeffs, i);
    ResidualReport rep;
    rep.cellwise = ScalarField(mu.grid, 0.0);
    double sq = 0;
    for (std::size_t c = 0; c < mu.grid.cell_count; ++c) {
        double adv = 0;
        for (int k = 0; k < mu.grid.dim; ++k)
            adv += coeffs.velocity[i][k].values[c] * detail::partial_at(mu, c, k);
        const double r = adv + div.values[c] + dissipation.values[c] + c_l;
        rep.cellwise.values[c] = r;
        rep.max_norm = std::max(rep.max_norm, std::abs(r));
        sq += r * r;
    }
    rep.l2_norm = std::sqrt(sq * mu.grid.cell_volume());
    return rep;
}

// ---------------------------------------------------------------------------
// Route 1: constant velocity (closed form).
// With j the axis of largest |a_j|, the transport equation a.grad(mu) = -C_L
// is solved exactly by mu(x) = g(y - (a_bar/a_j) x_j) - (C_L/a_j) x_j, where y
// collects the coordinates other than x_j and g is a free profile (default 0).
// ---------------------------------------------------------------------------

inline WeightComponent solve_weight_constant(std::span<const double> a, double c_l,
                                             const PointFunction& g, const StructuredGrid& grid,
                                             double residual_tol = 0) {
    const int d = grid.dim;
    if (static_cast<int>(a.size()) != d) throw Error("solve_weight_constant: velocity size != dim");
    int j = 0;
    for (int k = 1; k < d; ++k)
        if (std::abs(a[k]) > std::abs(a[j])) j = k;
    if (std::abs(a[j]) <= 1e-12)
        throw ValidationError("solve_weight_constant: a = 0 violates the non-characteristic condition");

    std::vector<double> y(static_cast<std::size_t>(d > 1 ? d - 1 : 0));
    auto closed_form = [&](std::span<const double> x) {
        int t = 0;
        for (int k = 0; k < d; ++k) {
            if (k == j) continue;
            y[t++] = x[k] - (a[k] / a[j]) * x[j];
        }
        const double profile = g ? g(y) : 0.0;
        return profile - (c_l / a[j]) * x[j];
    };

    WeightComponent out;
    out.c_l = c_l;
    out.mu = sample_field(grid, closed_form);
    const auto faces = boundary_faces(grid);
    out.face_values.reserve(faces.size());
    for (const auto& f : faces) out.face_values.push_back(closed_form(f.center));

    // Residual against the route's own equation (a . grad mu + C_L = 0).
    out.residual_tol = residual_tol > 0 ? residual_tol : 10.0 * grid.max_spacing();
    out.residual_max = 0;
    for (std::size_t c = 0; c < grid.cell_count; ++c) {
        double adv = 0;
        for (int k = 0; k < d; ++k) adv += a[k] * detail::partial_at(out.mu, c, k);
        out.residual_max = std::max(out.residual_max, std::abs(adv + c_l));
    }
    if (out.residual_max > out.residual_tol)
        throw ValidationError("solve_weight_constant: residual " + std::to_string(out.residual_max) +
                              " exceeds tolerance (profile g too rough for this grid?)");
    return out;
}

// ---------------------------------------------------------------------------
// Route 2: separable Hamiltonian gradient a = (H_1(x_1), ..., H_d(x_d)) with
// diagonal B = diag(H_k'(x_k)) and D = -2B. The additive ansatz
// mu_i = sum_k F_k(x_k) reduces the weight equation to 1-D integrations
//   H_k F_k' = c_k + (2 delta_ki - 1) H_k',
// with the free constants fixed by evaluating the full equation at the domain
// center (c_k = 0 except the first axis).
// ---------------------------------------------------------------------------

struct AxisFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::function<double(double)> deriv2;
};

inline AxisFunction axis_polynomial(std::vector<double> coeffs) {
    auto horner = [](const std::vector<double>& cs, double s) {
        double v = 0;
        for (std::size_t q = cs.size(); q-- > 0;) v = v * s + cs[q];
        return v;
    };
    AxisFunction f;
    std::vector<double> d1, d2;
    for (std::size_t q = 1; q < coeffs.size(); ++q) d1.push_back(coeffs[q] * static_cast<double>(q));
    for (std::size_t q = 1; q < d1.size(); ++q) d2.push_back(d1[q] * static_cast<double>(q));
    f.value = [coeffs, horner](double s) { return horner(coeffs, s); };
    f.deriv = [d1, horner](double s) { return horner(d1, s); };
    f.deriv2 = [d2, horner](double s) { return horner(d2, s); };
    return f;
}

namespace detail {

/// Composite Simpson over [a, b] with an even subdivision count.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int q = 1; q < n; ++q) acc += f(a + q * h) * (q % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace detail

inline WeightComponent solve_weight_separable(std::span<const AxisFunction> H, int comp, double c_l,
                                              const StructuredGrid& grid, double residual_tol = 0) {
    const int d = grid.dim;
    if (static_cast<int>(H.size()) != d) throw Error("solve_weight_separable: need one H_k per axis");
    if (comp < 0 || comp >= d) throw Error("solve_weight_separable: component index out of range");

    // H_k must not vanish anywhere on its axis range (it divides F_k').
    for (int k = 0; k < d; ++k) {
        const int probes = 4 * grid.cells[k] + 1;
        for (int q = 0; q <= probes; ++q) {
            const double s = grid.lower[k] + (grid.upper[k] - grid.lower[k]) * q / probes;
            if (std::abs(H[k].value(s)) < 1e-12)
                throw ValidationError("solve_weight_separable: H_" + std::to_string(k + 1) +
                                      " vanishes on the axis range");
        }
    }

    // Calibrate the single free constant at the domain center.
    std::vector<double> xc(d);
    for (int k = 0; k < d; ++k) xc[k] = 0.5 * (grid.lower[k] + grid.upper[k]);
    double lhs0 = 0;
    for (int k = 0; k < d; ++k) {
        const double sign = k == comp ? 1.0 : -1.0;
        lhs0 += sign * H[k].deriv(xc[k]);            // H_k * F_k' with c_k = 0
        lhs0 += H[k].deriv(xc[k]);                   // div a
    }
    lhs0 -= 2.0 * H[comp].deriv(xc[comp]);           // D_ii = -2 H_i'
    const double c0 = -c_l - lhs0;

    auto f_prime = [&](int k, double s) {
        const double sign = k == comp ? 1.0 : -1.0;
        return (sign * H[k].deriv(s) + (k == 0 ? c0 : 0.0)) / H[k].value(s);
    };

    // Cumulative Simpson along each axis at cell centers and both face bounds.
    std::vector<std::vector<double>> f_at_center(d); // F_k at cell centers
    std::vector<std::array<double, 2>> f_at_bound(d);
    for (int k = 0; k < d; ++k) {
        auto fp = [&, k](double s) { return f_prime(k, s); };
        std::vector<double> coords;
        coords.push_back(grid.lower[k]);
        for (int q = 0; q < grid.cells[k]; ++q) coords.push_back(grid.center(k, q));
        coords.push_back(grid.upper[k]);
        std::vector<double> cum(coords.size(), 0.0);
        for (std::size_t q = 1; q < coords.size(); ++q)
            cum[q] = cum[q - 1] + detail::simpson(fp, coords[q - 1], coords[q], 8);
        f_at_bound[k] = {cum.front(), cum.back()};
        f_at_center[k].assign(cum.begin() + 1, cum.end() - 1);
    }

    WeightComponent out;
    out.c_l = c_l;
    out.mu = ScalarField(grid, 0.0);
    for (std::size_t c = 0; c < grid.cell_count; ++c) {
        std::size_t rem = c;
        double acc = 0;
        for (int k = 0; k < d; ++k) {
            const int j = static_cast<int>(rem % static_cast<std::size_t>(grid.cells[k]));
            rem /= static_cast<std::size_t>(grid.cells[k]);
            acc += f_at_center[k][j];
        }
        out.mu.values[c] = acc;
    }
    const auto faces = boundary_faces(grid);
    out.face_values.reserve(faces.size());
    std::vector<int> idx(d);
    for (const auto& f : faces) {
        double acc = f_at_bound[f.axis][f.side];
        std::size_t rem = f.adjacent_cell;
        for (int k = 0; k < d; ++k) {
            const int j = static_cast<int>(rem % static_cast<std::size_t>(grid.cells[k]));
            rem /= static_cast<std::size_t>(grid.cells[k]);
            if (k != f.axis) acc += f_at_center[k][j];
        }
        out.face_values.push_back(acc);
    }

    // Residual of the full weight equation with D = -2 diag(H_k'), same
    // stencils as weight_residual.
    out.residual_tol = residual_tol > 0 ? residual_tol : 10.0 * grid.max_spacing();
    out.residual_max = 0;
    for (std::size_t c = 0; c < grid.cell_count; ++c) {
        const auto x = grid.cell_center(c);
        double r = c_l - 2.0 * H[comp].deriv(x[comp]);
        for (int k = 0; k < d; ++k)
            r += H[k].value(x[k]) * detail::partial_at(out.mu, c, k) + H[k].deriv(x[k]);
        out.residual_max = std::max(out.residual_max, std::abs(r));
    }
    if (out.residual_max > out.residual_tol)
        throw ValidationError("solve_weight_separable: residual " + std::to_string(out.residual_max) +
                              " exceeds tolerance after constant calibration");
    return out;
}

// ---------------------------------------------------------------------------
// Route 3: general method of characteristics. Characteristics of a_i are
// integrated forward from inflow-face seeds with classical RK4, accumulating
//   d mu / ds = -C_L - div(a_i) - D_ii
// along dx/ds = a_i(x), and the traces are scattered to cell centers with the
// inverse-distance-weighted local fit from detail/scatter.hpp.
// ---------------------------------------------------------------------------

struct CharacteristicOptions {
    double step = 0;            // ODE parameter step h_char (default min h_k / 8)
    double seed_pitch = 0;      // transverse seed spacing (default min h_k / 2)
    double gather_radius = 0;   // scatter radius (default max h_k, "one cell radius")
    std::size_t max_steps = 0;  // per-trace guard (default scaled to domain / velocity)
    double residual_tol = 0;    // default 10 * max h_k
};

struct CharacteristicTrace {
    enum class Termination { Exited, MaxSteps };
    std::vector<double> seed;
    std::vector<double> arc;       // parameter s per recorded point
    std::vector<double> positions; // dim values per point
    std::vector<double> mu;
    Termination termination = Termination::Exited;
};

inline WeightComponent solve_weight_characteristics(
    const CoefficientSet& coeffs, int comp, const ScalarField& dissipation, double c_l,
    const PointFunction& anchor, const CharacteristicOptions& opts = {},
    std::vector<CharacteristicTrace>* traces = nullptr) {
    const auto& grid = coeffs.grid;
    const int d = grid.dim;

    // Non-characteristic condition and the global minimum speed (step budget).
    double min_speed = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < grid.cell_count; ++c) {
        double norm2 = 0;
        for (int k = 0; k < d; ++k) {
            const double v = coeffs.velocity[comp][k].values[c];
            norm2 += v * v;
        }
        min_speed = std::min(min_speed, std::sqrt(norm2));
    }
    if (!(min_speed > 1e-12))
        throw ValidationError("solve_weight_characteristics: a_i ~ 0 violates the "
                              "non-characteristic condition");

    const double h_char = opts.step > 0 ? opts.step : grid.min_spacing() / 8.0;
    const double pitch = opts.seed_pitch > 0 ? opts.seed_pitch : grid.min_spacing() / 2.0;
    const double radius = opts.gather_radius > 0 ? opts.gather_radius : grid.max_spacing();
    const double tol = opts.residual_tol > 0 ? opts.residual_tol : 10.0 * grid.max_spacing();
    double extent_sum = 0;
    for (int k = 0; k < d; ++k) extent_sum += grid.upper[k] - grid.lower[k];
    std::size_t max_steps = opts.max_steps;
    if (max_steps == 0) {
        const double budget = 50.0 * extent_sum / (min_speed * h_char);
        max_steps = static_cast<std::size_t>(std::clamp(budget, 1e3, 5e6));
    }

    const ScalarField div = divergence_a(coeffs, comp);
    auto mu_rate = [&](std::span<const double> x) {
        return -c_l - detail::interp_multilinear(div, x) -
               detail::interp_multilinear(dissipation, x);
    };
    auto vel = [&](std::span<const double> x, std::span<double> out) {
        for (int k = 0; k < d; ++k) out[k] = coeffs.velocity_at(comp, k, x);
    };

    // One classical RK4 step of size h for the joint state (x, mu).
    std::vector<double> k1(d), k2(d), k3(d), k4(d), xs(d);
    auto rk4 = [&](std::span<const double> x, double mu, double h, std::span<double> x_out,
                   double& mu_out) {
        vel(x, k1);
        const double m1 = mu_rate(x);
        for (int k = 0; k < d; ++k) xs[k] = x[k] + 0.5 * h * k1[k];
        vel(xs, k2);
        const double m2 = mu_rate(xs);
        for (int k = 0; k < d; ++k) xs[k] = x[k] + 0.5 * h * k2[k];
        vel(xs, k3);
        const double m3 = mu_rate(xs);
        for (int k = 0; k < d; ++k) xs[k] = x[k] + h * k3[k];
        vel(xs, k4);
        const double m4 = mu_rate(xs);
        for (int k = 0; k < d; ++k)
            x_out[k] = x[k] + h / 6.0 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
        mu_out = mu + h / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4);
    };

    detail::ScatterCloud cloud(grid, radius);
    const auto faces = boundary_faces(grid);

    std::vector<double> seed(d), x(d), xn(d), xe(d);
    for (const auto& face : faces) {
        if (!(coeffs.normal_speed(comp, face) < 0)) continue;

        // Transverse seed lattice covering the face at the requested pitch;
        // even counts keep the face center in the lattice. Shared edge seeds
        // are emitted by the lower neighbor only.
        std::vector<int> tr_axes;
        std::vector<int> counts;
        for (int k = 0; k < d; ++k) {
            if (k == face.axis) continue;
            tr_axes.push_back(k);
            int cnt = std::max(2, static_cast<int>(std::ceil(grid.spacing[k] / pitch)));
            if (cnt % 2) ++cnt;
            counts.push_back(cnt);
        }
        std::vector<int> q(tr_axes.size(), 0);
        while (true) {
            bool emit = true;
            seed.assign(face.center.begin(), face.center.end());
            for (std::size_t t = 0; t < tr_axes.size(); ++t) {
                const int k = tr_axes[t];
                const std::size_t cell_j =
                    (face.adjacent_cell / grid.stride[k]) % static_cast<std::size_t>(grid.cells[k]);
                if (q[t] == counts[t] && cell_j + 1 != static_cast<std::size_t>(grid.cells[k]))
                    emit = false; // upper edge owned by the next face
                seed[k] = face.center[k] - 0.5 * grid.spacing[k] +
                          grid.spacing[k] * q[t] / counts[t];
            }
            if (emit) {
                double an = 0;
                for (int k = 0; k < d; ++k)
                    an += face.normal(k) * coeffs.velocity_at(comp, k, seed);
                if (an < -1e-14) {
                    // Integrate this characteristic until it exits the box.
                    CharacteristicTrace trace;
                    if (traces) trace.seed = seed;
                    x = seed;
                    double mu = anchor ? anchor(seed) : 0.0;
                    double s = 0;
                    cloud.add(x, mu);
                    if (traces) {
                        trace.arc.push_back(s);
                        trace.positions.insert(trace.positions.end(), x.begin(), x.end());
                        trace.mu.push_back(mu);
                    }
                    bool exited = false;
                    for (std::size_t it = 0; it < max_steps; ++it) {
                        double mun = 0;
                        rk4(x, mu, h_char, xn, mun);
                        for (double v : xn)
                            if (!std::isfinite(v))
                                throw Error("solve_weight_characteristics: trace diverged");
                        if (grid.contains(xn)) {
                            x = xn;
                            mu = mun;
                            s += h_char;
                        } else {
                            // Bisect the step fraction to land on the boundary.
                            double lo = 0, hi = 1, mue = mu;
                            for (int b = 0; b < 60; ++b) {
                                const double mid = 0.5 * (lo + hi);
                                rk4(x, mu, h_char * mid, xe, mue);
                                (grid.contains(xe) ? lo : hi) = mid;
                            }
                            rk4(x, mu, h_char * lo, xe, mue);
                            x = xe;
                            mu = mue;
                            s += h_char * lo;
                            exited = true;
                        }
                        cloud.add(x, mu);
                        if (traces) {
                            trace.arc.push_back(s);
                            trace.positions.insert(trace.positions.end(), x.begin(), x.end());
                            trace.mu.push_back(mu);
                        }
                        if (exited) break;
                    }
                    if (!exited) {
                        if (traces) {
                            trace.termination = CharacteristicTrace::Termination::MaxSteps;
                            traces->push_back(std::move(trace));
                        }
                        throw ValidationError(
                            "solve_weight_characteristics: characteristic exceeded " +
                            std::to_string(max_steps) +
                            " steps without leaving the domain (recirculating or trapped flow)");
                    }
                    if (traces) traces->push_back(std::move(trace));
                }
            }
            std::size_t t = 0;
            while (t < tr_axes.size() && ++q[t] > counts[t]) { q[t] = 0; ++t; }
            if (t == tr_axes.size()) break; // includes the 1-D single-seed case
        }
    }

    if (cloud.size() == 0)
        throw ValidationError("solve_weight_characteristics: no inflow boundary for this "
                              "component (nothing anchors the weight)");

    WeightComponent out;
    out.c_l = c_l;
    out.mu = ScalarField(grid, 0.0);
    for (std::size_t c = 0; c < grid.cell_count; ++c)
        out.mu.values[c] = cloud.evaluate(grid.cell_center(c));
    out.face_values.reserve(faces.size());
    for (const auto& face : faces) {
        if (coeffs.normal_speed(comp, face) < 0) {
            out.face_values.push_back(anchor ? anchor(face.center) : 0.0); // inflow datum
        } else {
            const double v = cloud.evaluate(face.center, /*required=*/false);
            out.face_values.push_back(std::isfinite(v) ? v : out.mu.values[face.adjacent_cell]);
        }
    }

    for (double v : out.mu.values)
        if (std::abs(v) > kMaxWeightExponent)
            throw ValidationError("solve_weight_characteristics: |mu| exceeds 700; rejected");

    const auto rep = weight_residual(out.mu, coeffs, comp, dissipation, c_l);
    out.residual_max = rep.max_norm;
    out.residual_tol = tol;
    if (rep.max_norm > tol)
        throw ValidationError("solve_weight_characteristics: residual " +
                              std::to_string(rep.max_norm) + " exceeds tolerance " +
                              std::to_string(tol));
    return out;
}

} // namespace hypctl
