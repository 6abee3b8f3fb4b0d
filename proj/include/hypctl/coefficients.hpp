#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypctl/detail/interp.hpp"
#include "hypctl/field.hpp"
#include "hypctl/grid.hpp"

namespace hypctl {

/// Sampled coefficients of the balance law: per-component velocity fields
/// a_i (the diagonal entries of the A^(k)) and the coupling matrix B.
///
/// Analytic callables, when supplied, are preferred wherever a value is
/// needed off the cell-center lattice (boundary faces, characteristic
/// traces); otherwise multilinear interpolation of the samples is used.
struct CoefficientSet {
    StructuredGrid grid;
    int n = 0; // number of state components

    // velocity[i][k]: k-th component of a_i at cell centers.
    std::vector<std::vector<ScalarField>> velocity;
    // coupling[i*n + j] = B_ij at cell centers (row-major).
    std::vector<ScalarField> coupling;
    // Analytic divergence of a_i per component; empty optional means
    // divergence_a falls back to numerical differencing of the samples.
    std::vector<std::optional<ScalarField>> divergence;
    // Optional analytic velocity evaluators, velocity_fn[i][k].
    std::vector<std::vector<PointFunction>> velocity_fn;

    bool has_analytic_velocity() const { return !velocity_fn.empty(); }

    double velocity_at(int i, int k, std::span<const double> x) const {
        if (has_analytic_velocity()) return velocity_fn[i][k](x);
        return detail::interp_multilinear(velocity[i][k], x);
    }

    /// a_i . n at a boundary face center.
    double normal_speed(int i, const BoundaryFace& face) const {
        if (has_analytic_velocity())
            return face.normal(face.axis) * velocity_fn[i][face.axis](face.center);
        // The face center shares all transverse coordinates with the adjacent
        // cell center, so clamped interpolation reduces to that cell's sample.
        return face.normal(face.axis) * velocity[i][face.axis].values[face.adjacent_cell];
    }

    double coupling_at(int i, int j, std::size_t cell) const {
        return coupling[static_cast<std::size_t>(i) * n + j].values[cell];
    }
};

/// Builds a CoefficientSet by sampling callables. `velocity(i) -> d functions`,
/// `b(i,j)` entries, optional analytic divergence div(i).
inline CoefficientSet make_coefficients(
    const StructuredGrid& grid, int n,
    const std::function<PointFunction(int i, int k)>& velocity,
    const std::function<PointFunction(int i, int j)>& b = nullptr,
    const std::function<PointFunction(int i)>& div = nullptr) {
    CoefficientSet cs;
    cs.grid = grid;
    cs.n = n;
    cs.velocity.resize(n);
    cs.velocity_fn.resize(n);
    for (int i = 0; i < n; ++i) {
        cs.velocity[i].reserve(grid.dim);
        cs.velocity_fn[i].reserve(grid.dim);
        for (int k = 0; k < grid.dim; ++k) {
            auto fn = velocity(i, k);
            cs.velocity[i].push_back(sample_field(grid, fn));
            cs.velocity_fn[i].push_back(std::move(fn));
        }
    }
    cs.coupling.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (b) cs.coupling.push_back(sample_field(grid, b(i, j)));
            else cs.coupling.push_back(ScalarField(grid, 0.0));
        }
    cs.divergence.resize(n);
    if (div)
        for (int i = 0; i < n; ++i) cs.divergence[i] = sample_field(grid, div(i));
    return cs;
}

/// Convenience builder for constant velocities a_i and constant B.
inline CoefficientSet make_constant_coefficients(const StructuredGrid& grid,
                                                 const std::vector<std::vector<double>>& a,
                                                 const std::vector<double>& b_rowmajor = {}) {
    const int n = static_cast<int>(a.size());
    auto cs = make_coefficients(
        grid, n,
        [&](int i, int k) -> PointFunction {
            const double v = a[i][k];
            return [v](std::span<const double>) { return v; };
        },
        b_rowmajor.empty()
            ? std::function<PointFunction(int, int)>(nullptr)
            : std::function<PointFunction(int, int)>([&, n](int i, int j) -> PointFunction {
                  const double v = b_rowmajor[static_cast<std::size_t>(i) * n + j];
                  return [v](std::span<const double>) { return v; };
              }),
        [](int) -> PointFunction {
            return [](std::span<const double>) { return 0.0; };
        });
    return cs;
}

/// Rejects velocity fields violating the non-characteristic condition
/// |a_i(x)| > 0 (threshold 1e-12) at any cell center.
inline void require_non_characteristic(const CoefficientSet& cs, double threshold = 1e-12) {
    for (int i = 0; i < cs.n; ++i)
        for (std::size_t c = 0; c < cs.grid.cell_count; ++c) {
            double norm2 = 0;
            for (int k = 0; k < cs.grid.dim; ++k) {
                const double v = cs.velocity[i][k].values[c];
                if (!std::isfinite(v)) throw Error("coefficients: non-finite velocity sample");
                norm2 += v * v;
            }
            if (std::sqrt(norm2) <= threshold)
                throw ValidationError("non-characteristic condition violated: |a_" +
                                      std::to_string(i + 1) + "| ~ 0 at cell " + std::to_string(c));
        }
}

/// Divergence of a_i: the stored analytic field when available, otherwise
/// differenced from the velocity samples (central interior, one-sided at
/// boundary-adjacent cells).
inline ScalarField divergence_a(const CoefficientSet& cs, int i) {
    if (i < 0 || i >= cs.n) throw Error("divergence_a: component index out of range");
    if (cs.divergence[i]) return *cs.divergence[i];
    ScalarField out(cs.grid, 0.0);
    for (std::size_t c = 0; c < cs.grid.cell_count; ++c) {
        double div = 0;
        for (int k = 0; k < cs.grid.dim; ++k) div += detail::partial_at(cs.velocity[i][k], c, k);
        out.values[c] = div;
    }
    return out;
}

} // namespace hypctl
