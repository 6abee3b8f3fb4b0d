#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hypctl/errors.hpp"

namespace hypctl {

/// Uniform cell-centered Cartesian grid on an axis-aligned box.
///
/// Cell centers sit at lower[k] + (j + 1/2) * spacing[k]; boundary data lives
/// on the faces of the outermost cells. Linear cell indices are axis-0-fastest.
struct StructuredGrid {
    int dim = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<int> cells;        // m_k >= 2 per axis
    std::vector<double> spacing;   // h_k = (upper_k - lower_k) / m_k
    std::vector<std::size_t> stride;
    std::size_t cell_count = 0;

    double center(int axis, int idx) const {
        return lower[axis] + (static_cast<double>(idx) + 0.5) * spacing[axis];
    }

    std::size_t linear(std::span<const int> idx) const {
        std::size_t lin = 0;
        for (int k = 0; k < dim; ++k) lin += static_cast<std::size_t>(idx[k]) * stride[k];
        return lin;
    }

    void unravel(std::size_t lin, std::span<int> idx) const {
        for (int k = 0; k < dim; ++k) {
            idx[k] = static_cast<int>(lin % static_cast<std::size_t>(cells[k]));
            lin /= static_cast<std::size_t>(cells[k]);
        }
    }

    std::vector<double> cell_center(std::size_t lin) const {
        std::vector<double> x(dim);
        for (int k = 0; k < dim; ++k) {
            const int j = static_cast<int>(lin % static_cast<std::size_t>(cells[k]));
            lin /= static_cast<std::size_t>(cells[k]);
            x[k] = center(k, j);
        }
        return x;
    }

    bool contains(std::span<const double> x) const {
        for (int k = 0; k < dim; ++k)
            if (x[k] < lower[k] || x[k] > upper[k]) return false;
        return true;
    }

    double max_spacing() const {
        double h = 0;
        for (double hk : spacing) h = std::max(h, hk);
        return h;
    }

    double min_spacing() const {
        double h = spacing[0];
        for (double hk : spacing) h = std::min(h, hk);
        return h;
    }

    double cell_volume() const {
        double v = 1;
        for (double hk : spacing) v *= hk;
        return v;
    }

    bool operator==(const StructuredGrid& o) const {
        return dim == o.dim && lower == o.lower && upper == o.upper && cells == o.cells;
    }
};

inline StructuredGrid build_grid(std::span<const double> lower, std::span<const double> upper,
                                 std::span<const int> cells) {
    if (lower.size() != upper.size() || lower.size() != cells.size() || lower.empty())
        throw Error("build_grid: corner/cell arrays must be nonempty and of equal length");
    StructuredGrid g;
    g.dim = static_cast<int>(lower.size());
    g.lower.assign(lower.begin(), lower.end());
    g.upper.assign(upper.begin(), upper.end());
    g.cells.assign(cells.begin(), cells.end());
    g.spacing.resize(g.dim);
    g.stride.resize(g.dim);
    g.cell_count = 1;
    for (int k = 0; k < g.dim; ++k) {
        if (!(upper[k] > lower[k]))
            throw Error("build_grid: axis " + std::to_string(k) + " has non-positive extent");
        if (cells[k] < 2)
            throw Error("build_grid: axis " + std::to_string(k) + " needs at least 2 cells");
        g.spacing[k] = (upper[k] - lower[k]) / cells[k];
        g.stride[k] = g.cell_count;
        g.cell_count *= static_cast<std::size_t>(cells[k]);
    }
    return g;
}

/// One boundary face of the box: the outer face of a boundary cell.
/// The unit outward normal is -e_axis (side 0) or +e_axis (side 1).
struct BoundaryFace {
    int axis = 0;
    int side = 0;                  // 0: lower boundary, 1: upper boundary
    std::size_t adjacent_cell = 0; // linear index of the interior cell it bounds
    std::vector<double> center;
    double area = 1.0;             // product of transverse spacings (1 in 1-D)

    double normal(int k) const { return k == axis ? (side == 0 ? -1.0 : 1.0) : 0.0; }
};

/// Number of boundary faces: sum_k 2 * prod_{l != k} m_l.
inline std::size_t boundary_face_count(const StructuredGrid& g) {
    std::size_t total = 0;
    for (int k = 0; k < g.dim; ++k)
        total += 2 * (g.cell_count / static_cast<std::size_t>(g.cells[k]));
    return total;
}

/// Enumerates all boundary faces in a fixed deterministic order:
/// axis-major, lower side before upper, transverse indices lexicographic
/// (in the reduced axis ordering). This order is shared by every consumer
/// (partitions, ghost layers, weight face caches).
inline std::vector<BoundaryFace> boundary_faces(const StructuredGrid& g) {
    std::vector<BoundaryFace> faces;
    faces.reserve(boundary_face_count(g));
    std::vector<int> idx(g.dim);
    for (int k = 0; k < g.dim; ++k) {
        const std::size_t transverse = g.cell_count / static_cast<std::size_t>(g.cells[k]);
        for (int side = 0; side < 2; ++side) {
            for (std::size_t t = 0; t < transverse; ++t) {
                BoundaryFace f;
                f.axis = k;
                f.side = side;
                // Expand the transverse linear index into a full cell index.
                std::size_t rem = t;
                for (int l = 0; l < g.dim; ++l) {
                    if (l == k) { idx[l] = side == 0 ? 0 : g.cells[k] - 1; continue; }
                    idx[l] = static_cast<int>(rem % static_cast<std::size_t>(g.cells[l]));
                    rem /= static_cast<std::size_t>(g.cells[l]);
                }
                f.adjacent_cell = g.linear(idx);
                f.center.resize(g.dim);
                f.area = 1.0;
                for (int l = 0; l < g.dim; ++l) {
                    if (l == k) {
                        f.center[l] = side == 0 ? g.lower[k] : g.upper[k];
                    } else {
                        f.center[l] = g.center(l, idx[l]);
                        f.area *= g.spacing[l];
                    }
                }
                faces.push_back(std::move(f));
            }
        }
    }
    return faces;
}

/// Face id of the (axis, side) face bounding the given boundary cell, in the
/// boundary_faces() ordering. The cell must actually touch that boundary.
inline std::size_t face_index(const StructuredGrid& g, int axis, int side, std::size_t cell_lin) {
    std::size_t base = 0;
    for (int k = 0; k < axis; ++k)
        base += 2 * (g.cell_count / static_cast<std::size_t>(g.cells[k]));
    const std::size_t transverse = g.cell_count / static_cast<std::size_t>(g.cells[axis]);
    if (side == 1) base += transverse;
    // Transverse linear index: strip the `axis` digit from the cell index.
    std::size_t t = 0, mult = 1, rem = cell_lin;
    for (int l = 0; l < g.dim; ++l) {
        const std::size_t digit = rem % static_cast<std::size_t>(g.cells[l]);
        rem /= static_cast<std::size_t>(g.cells[l]);
        if (l == axis) continue;
        t += digit * mult;
        mult *= static_cast<std::size_t>(g.cells[l]);
    }
    return base + t;
}

} // namespace hypctl
