#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypctl/boundary.hpp"
#include "hypctl/coefficients.hpp"
#include "hypctl/dissipativity.hpp"
#include "hypctl/scenario.hpp"
#include "hypctl/weights.hpp"

namespace hypctl {

/// A Hamiltonian H(x, Psi) with a reference gradient state to linearize at.
/// Analytic derivatives are optional; central differences fill in for them
/// (d_psi = 1e-6 (1 + |psi_ref|), d_x = h_k / 2).
struct HamiltonianSpec {
    std::function<double(std::span<const double> x, std::span<const double> psi)> value;
    // dH/dpsi_k (x, psi); optional.
    std::function<double(std::span<const double> x, std::span<const double> psi, int k)> grad_psi;
    // dH_k/dx_i at psi_ref; optional.
    std::function<double(std::span<const double> x, int k, int i)> grad_x;
    std::vector<double> psi_ref;
};

/// Linearization around psi_ref: A^(k) = H_k(x) Id (so a_i = grad_psi H for
/// every component) and B_ik = dH_k/dx_i. The divergence of a_i equals
/// trace(B) and is stored analytically.
inline CoefficientSet linearize_hamiltonian(const HamiltonianSpec& spec,
                                            const StructuredGrid& grid) {
    const int d = grid.dim;
    const int n = d; // the HJ reduction forces state dimension = space dimension
    if (static_cast<int>(spec.psi_ref.size()) != d)
        throw Error("linearize_hamiltonian: psi_ref size must equal the space dimension");

    double ref_norm = 0;
    for (double v : spec.psi_ref) ref_norm += v * v;
    const double d_psi = 1e-6 * (1.0 + std::sqrt(ref_norm));

    // The coefficient set keeps these evaluators alive past this call, so they
    // own a shared copy of the spec.
    auto shared = std::make_shared<const HamiltonianSpec>(spec);
    auto h_k = [shared, d_psi](std::span<const double> x, int k) -> double {
        if (shared->grad_psi) return shared->grad_psi(x, shared->psi_ref, k);
        std::vector<double> psi(shared->psi_ref);
        psi[k] += d_psi;
        const double up = shared->value(x, psi);
        psi[k] -= 2 * d_psi;
        const double dn = shared->value(x, psi);
        return (up - dn) / (2 * d_psi);
    };
    const std::vector<double> h_x = grid.spacing;
    auto b_ik = [shared, h_k, h_x](std::span<const double> x, int k, int i) -> double {
        if (shared->grad_x) return shared->grad_x(x, k, i);
        const double dx = h_x[i] / 2.0;
        std::vector<double> xp(x.begin(), x.end());
        xp[i] += dx;
        const double up = h_k(xp, k);
        xp[i] -= 2 * dx;
        const double dn = h_k(xp, k);
        return (up - dn) / (2 * dx);
    };

    auto cs = make_coefficients(
        grid, n,
        [&](int, int k) -> PointFunction {
            return [h_k, k](std::span<const double> x) { return h_k(x, k); };
        },
        [&](int i, int j) -> PointFunction {
            return [b_ik, i, j](std::span<const double> x) { return b_ik(x, j, i); };
        },
        [&](int) -> PointFunction {
            return [b_ik, d](std::span<const double> x) {
                double div = 0;
                for (int k = 0; k < d; ++k) div += b_ik(x, k, k);
                return div;
            };
        });

    // Non-characteristic check: |grad_psi H| must not vanish anywhere.
    require_non_characteristic(cs);
    return cs;
}

using InitialData = std::function<double(int component, std::span<const double> x)>;

/// Shared knobs of the canned scenario factories. Unset mode/theta fall back
/// to the scenario's natural choice: sharp equality with theta = 1 where the
/// Corollary applies (diagonal B), single-scalar with theta = 0.9 otherwise.
struct ScenarioOptions {
    std::optional<ControlMode> mode;
    std::optional<double> theta;
    double t_final = 1.0;
    double cfl_factor = 0.5;
    std::vector<FaceSelection> control_faces; // empty: all inflow faces controlled
    double weight_tol = 0;
    CharacteristicOptions characteristics;
    PointFunction weight_anchor; // inflow datum for the characteristics route
    std::string fingerprint;
};

namespace detail {

inline Scenario finish_scenario(CoefficientSet coeffs, std::vector<WeightComponent> wcomps,
                                DissipationMode diss_mode, const InitialData& initial,
                                const ScenarioOptions& opts, ControlMode default_mode,
                                const std::string& default_name) {
    Scenario sc;
    sc.grid = coeffs.grid;
    sc.n = coeffs.n;
    sc.coeffs = std::move(coeffs);
    sc.weights = assemble_weights(std::move(wcomps));
    sc.dissipation = build_dissipation(sc.coeffs.coupling, sc.weights.mu, sc.n, diss_mode);
    sc.partition = partition_boundary(sc.coeffs, sc.weights, opts.control_faces);
    sc.initial = sample_state(sc.grid, sc.n, initial);
    sc.control_mode = opts.mode.value_or(default_mode);
    if (sc.control_mode == ControlMode::SharpEquality)
        sc.theta = 1.0;
    else
        sc.theta = opts.theta.value_or(0.9);
    sc.t_final = opts.t_final;
    sc.cfl_factor = opts.cfl_factor;
    sc.weight_tol = opts.weight_tol;
    sc.fingerprint = opts.fingerprint.empty() ? default_name : opts.fingerprint;
    return sc;
}

} // namespace detail

/// Constant Hamiltonian gradient grad_psi H = C != 0: no coupling (B = 0,
/// D = 0) and closed-form weights mu_i = g(y - a x_j) - (C_L / C_j) x_j.
/// The default g = 0 reproduces the one-dimensional stabilizing weights.
inline Scenario scenario_constant_gradient(std::span<const double> c, const StructuredGrid& grid,
                                           double c_l, const PointFunction& g,
                                           const InitialData& initial,
                                           const ScenarioOptions& opts = {}) {
    const int d = grid.dim;
    double norm = 0;
    for (double v : c) norm += v * v;
    if (!(std::sqrt(norm) > 1e-12))
        throw ValidationError("scenario_constant_gradient: C = 0 is excluded "
                              "(the Hamilton-Jacobi equation degenerates)");
    std::vector<std::vector<double>> a(static_cast<std::size_t>(d),
                                       std::vector<double>(c.begin(), c.end()));
    auto coeffs = make_constant_coefficients(grid, a);
    const WeightComponent w0 = solve_weight_constant(c, c_l, g, grid, opts.weight_tol);
    std::vector<WeightComponent> wcomps(static_cast<std::size_t>(d), w0);
    return detail::finish_scenario(std::move(coeffs), std::move(wcomps),
                                   DissipationMode::DiagonalB, initial, opts,
                                   ControlMode::SharpEquality, "constant-gradient");
}

/// Separable Hamiltonian H = sum_k H_k(x_k) psi_k: diagonal B = diag(H_k'),
/// D = -2B, additive-ansatz weights, sharp-equality control by default.
inline Scenario scenario_separable(std::span<const AxisFunction> h, const StructuredGrid& grid,
                                   double c_l, const InitialData& initial,
                                   const ScenarioOptions& opts = {}) {
    const int d = grid.dim;
    if (static_cast<int>(h.size()) != d)
        throw Error("scenario_separable: need one H_k per axis");
    auto coeffs = make_coefficients(
        grid, d,
        [&](int, int k) -> PointFunction {
            const auto fn = h[k].value;
            return [fn, k](std::span<const double> x) { return fn(x[k]); };
        },
        [&](int i, int j) -> PointFunction {
            if (i != j) return [](std::span<const double>) { return 0.0; };
            const auto dfn = h[i].deriv;
            return [dfn, i](std::span<const double> x) { return dfn(x[i]); };
        },
        [&, d](int) -> PointFunction {
            std::vector<std::function<double(double)>> derivs;
            for (int k = 0; k < d; ++k) derivs.push_back(h[k].deriv);
            return [derivs, d](std::span<const double> x) {
                double acc = 0;
                for (int k = 0; k < d; ++k) acc += derivs[k](x[k]);
                return acc;
            };
        });
    require_non_characteristic(coeffs);
    std::vector<WeightComponent> wcomps;
    wcomps.reserve(d);
    for (int i = 0; i < d; ++i)
        wcomps.push_back(solve_weight_separable(h, i, c_l, grid, opts.weight_tol));
    return detail::finish_scenario(std::move(coeffs), std::move(wcomps),
                                   DissipationMode::DiagonalB, initial, opts,
                                   ControlMode::SharpEquality, "separable");
}

/// Velocity field given as the gradient of a potential: B is the (symmetric)
/// Hessian, D = -2 lambda_min(Hessian) Id, weights from the characteristics
/// solver. All components share one weight because they share one equation.
struct PotentialSpec {
    std::function<double(std::span<const double> x, int k)> gradient;      // dphi/dx_k
    std::function<double(std::span<const double> x, int i, int k)> hessian; // optional
};

inline Scenario scenario_potential_flow(const PotentialSpec& phi, const StructuredGrid& grid,
                                        double c_l, const InitialData& initial,
                                        const ScenarioOptions& opts = {}) {
    const int d = grid.dim;
    if (!phi.gradient) throw Error("scenario_potential_flow: gradient callable required");
    auto shared = std::make_shared<const PotentialSpec>(phi); // outlives this call
    const std::vector<double> h_x = grid.spacing;
    auto hess = [shared, h_x](std::span<const double> x, int i, int k) -> double {
        if (shared->hessian) return shared->hessian(x, i, k);
        const double dx = h_x[i] / 2.0;
        std::vector<double> xp(x.begin(), x.end());
        xp[i] += dx;
        const double up = shared->gradient(xp, k);
        xp[i] -= 2 * dx;
        const double dn = shared->gradient(xp, k);
        return (up - dn) / (2 * dx);
    };
    auto coeffs = make_coefficients(
        grid, d,
        [&](int, int k) -> PointFunction {
            return [shared, k](std::span<const double> x) { return shared->gradient(x, k); };
        },
        [&](int i, int j) -> PointFunction {
            return [hess, i, j](std::span<const double> x) { return hess(x, i, j); };
        },
        [&, d](int) -> PointFunction {
            return [hess, d](std::span<const double> x) {
                double acc = 0;
                for (int k = 0; k < d; ++k) acc += hess(x, k, k);
                return acc;
            };
        });
    require_non_characteristic(coeffs);

    const auto d_diag = dissipation_diagonal(coeffs.coupling, d, DissipationMode::SymmetricEig, grid);
    const WeightComponent w0 = solve_weight_characteristics(
        coeffs, 0, d_diag[0], c_l, opts.weight_anchor, opts.characteristics);
    std::vector<WeightComponent> wcomps(static_cast<std::size_t>(d), w0);
    return detail::finish_scenario(std::move(coeffs), std::move(wcomps),
                                   DissipationMode::SymmetricEig, initial, opts,
                                   ControlMode::SingleScalar, "potential-flow");
}

/// Discrete gradient of a scalar potential, built with the shared stencils;
/// such states satisfy the cross-derivative identity exactly.
inline StateField discrete_gradient_state(const ScalarField& phi) {
    const auto& g = phi.grid;
    StateField w(g, g.dim);
    for (int k = 0; k < g.dim; ++k)
        for (std::size_t c = 0; c < g.cell_count; ++c)
            w.comp[k].values[c] = detail::partial_at(phi, c, k);
    return w;
}

/// Maximum over cells and index pairs of |d_i w_j - d_j w_i| (central /
/// one-sided stencils). Zero, up to rounding, for discrete gradient fields.
inline double gradient_consistency_check(const StateField& w) {
    const auto& g = w.grid;
    if (w.components() != g.dim)
        throw Error("gradient_consistency_check: needs n = d state");
    double worst = 0;
    for (int i = 0; i < g.dim; ++i)
        for (int j = i + 1; j < g.dim; ++j)
            for (std::size_t c = 0; c < g.cell_count; ++c) {
                const double commutator =
                    detail::partial_at(w.comp[j], c, i) - detail::partial_at(w.comp[i], c, j);
                worst = std::max(worst, std::abs(commutator));
            }
    return worst;
}

} // namespace hypctl
