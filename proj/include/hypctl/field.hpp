#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hypctl/grid.hpp"

namespace hypctl {

using PointFunction = std::function<double(std::span<const double>)>;

/// One real value per cell center.
struct ScalarField {
    StructuredGrid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const StructuredGrid& g, double fill = 0.0)
        : grid(g), values(g.cell_count, fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }

    double max_abs() const {
        double m = 0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

inline ScalarField sample_field(const StructuredGrid& g, const PointFunction& f) {
    ScalarField out(g);
    for (std::size_t c = 0; c < g.cell_count; ++c) {
        const auto x = g.cell_center(c);
        const double v = f(x);
        if (!std::isfinite(v))
            throw Error("sample_field: non-finite sample at cell " + std::to_string(c));
        out.values[c] = v;
    }
    return out;
}

/// The unknowns w_1..w_n at the current time.
struct StateField {
    StructuredGrid grid;
    std::vector<ScalarField> comp;
    double time = 0.0;

    StateField() = default;
    StateField(const StructuredGrid& g, int n) : grid(g), comp(n, ScalarField(g)) {}

    int components() const { return static_cast<int>(comp.size()); }

    double max_abs() const {
        double m = 0;
        for (const auto& c : comp) m = std::max(m, c.max_abs());
        return m;
    }

    bool finite() const {
        for (const auto& c : comp)
            for (double v : c.values)
                if (!std::isfinite(v)) return false;
        return true;
    }
};

inline StateField sample_state(const StructuredGrid& g, int n,
                               const std::function<double(int, std::span<const double>)>& f,
                               double time = 0.0) {
    StateField w(g, n);
    w.time = time;
    for (int i = 0; i < n; ++i)
        w.comp[i] = sample_field(g, [&](std::span<const double> x) { return f(i, x); });
    return w;
}

namespace detail {

/// Spatial partial derivative of a cell field along `axis` at cell `lin`:
/// second-order central in the interior, second-order one-sided at
/// boundary-adjacent cells (first-order two-point when the axis has only 2 cells).
inline double partial_at(const ScalarField& f, std::size_t lin, int axis) {
    const auto& g = f.grid;
    const std::size_t s = g.stride[axis];
    const int m = g.cells[axis];
    const double h = g.spacing[axis];
    const int j = static_cast<int>((lin / s) % static_cast<std::size_t>(m));
    const auto& v = f.values;
    if (j > 0 && j < m - 1)
        return (v[lin + s] - v[lin - s]) / (2 * h);
    if (m == 2)
        return j == 0 ? (v[lin + s] - v[lin]) / h : (v[lin] - v[lin - s]) / h;
    if (j == 0)
        return (-3 * v[lin] + 4 * v[lin + s] - v[lin + 2 * s]) / (2 * h);
    return (3 * v[lin] - 4 * v[lin - s] + v[lin - 2 * s]) / (2 * h);
}

} // namespace detail

} // namespace hypctl
