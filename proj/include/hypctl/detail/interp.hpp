#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "hypctl/field.hpp"

namespace hypctl::detail {

/// Multilinear interpolation of a cell-centered field at an arbitrary point.
/// Outside the outermost cell centers the stencil is not clamped, so the
/// interpolant extends linearly into the outer half-cells; this keeps globally
/// affine fields exact up to the domain boundary.
inline double interp_multilinear(const ScalarField& f, std::span<const double> x) {
    const auto& g = f.grid;
    const int d = g.dim;
    int base[8];
    double frac[8];
    for (int k = 0; k < d; ++k) {
        const double u = (x[k] - g.lower[k]) / g.spacing[k] - 0.5;
        int b = static_cast<int>(std::floor(u));
        b = std::clamp(b, 0, g.cells[k] - 2);
        base[k] = b;
        frac[k] = u - b;
    }
    double acc = 0;
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        double wgt = 1;
        std::size_t lin = 0;
        for (int k = 0; k < d; ++k) {
            const int bit = (c >> k) & 1;
            wgt *= bit ? frac[k] : (1.0 - frac[k]);
            lin += static_cast<std::size_t>(base[k] + bit) * g.stride[k];
        }
        acc += wgt * f.values[lin];
    }
    return acc;
}

} // namespace hypctl::detail
