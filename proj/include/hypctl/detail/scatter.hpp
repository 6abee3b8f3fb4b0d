#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypctl/errors.hpp"
#include "hypctl/grid.hpp"

namespace hypctl::detail {

/// Point cloud of (position, value) samples binned by grid cell, evaluated at
/// arbitrary targets through an inverse-distance-weighted local polynomial fit.
///
/// Plain Shepard averaging carries a first-order transverse bias wherever the
/// samples are laid out along curves (which characteristic traces are), so the
/// fit uses a quadratic model with linear / constant fallbacks. A sample that
/// coincides with the target short-circuits the fit and is returned verbatim.
class ScatterCloud {
public:
    ScatterCloud(const StructuredGrid& grid, double radius)
        : grid_(grid), radius_(radius), bins_(grid.cell_count) {
        reach_.resize(grid.dim);
        for (int k = 0; k < grid.dim; ++k)
            reach_[k] = std::max<int>(1, static_cast<int>(std::ceil(radius / grid.spacing[k])));
    }

    void add(std::span<const double> x, double value) {
        const std::size_t idx = points_.size() / stride();
        for (int k = 0; k < grid_.dim; ++k) points_.push_back(x[k]);
        points_.push_back(value);
        // Bin by containing cell, clamped so exit points on the boundary bin
        // into the adjacent cell.
        std::size_t lin = 0;
        for (int k = 0; k < grid_.dim; ++k) {
            int j = static_cast<int>(std::floor((x[k] - grid_.lower[k]) / grid_.spacing[k]));
            j = std::clamp(j, 0, grid_.cells[k] - 1);
            lin += static_cast<std::size_t>(j) * grid_.stride[k];
        }
        bins_[lin].push_back(static_cast<std::uint32_t>(idx));
    }

    std::size_t size() const { return points_.size() / stride(); }

    /// Weighted local fit around `target`. Throws if no sample lies within the
    /// gather radius. `required` == false returns NaN instead of throwing.
    double evaluate(std::span<const double> target, bool required = true) const {
        const int d = grid_.dim;
        gather(target);
        if (gathered_.empty()) {
            if (required)
                throw ValidationError(
                    "characteristic scatter: no trace sample within one cell radius of (" +
                    point_string(target) + "); reduce the seeding pitch or the step size");
            return std::numeric_limits<double>::quiet_NaN();
        }
        // Exact hit: return the sample value.
        if (nearest_dist_ <= 1e-9 * radius_) return nearest_value_;

        const int nq = 1 + d + d * (d + 1) / 2; // quadratic term count
        for (int terms : {nq, 1 + d, 1}) {
            if (static_cast<int>(gathered_.size()) < terms) continue;
            double value;
            if (fit(target, terms, value)) return value;
        }
        return nearest_value_; // degenerate geometry: nearest sample wins
    }

private:
    std::size_t stride() const { return static_cast<std::size_t>(grid_.dim) + 1; }

    std::string point_string(std::span<const double> x) const {
        std::string s;
        for (int k = 0; k < grid_.dim; ++k) s += (k ? "," : "") + std::to_string(x[k]);
        return s;
    }

    void gather(std::span<const double> target) const {
        const int d = grid_.dim;
        gathered_.clear();
        nearest_dist_ = std::numeric_limits<double>::infinity();
        nearest_value_ = std::numeric_limits<double>::quiet_NaN();

        int lo[8], hi[8], it[8];
        for (int k = 0; k < d; ++k) {
            const int j =
                static_cast<int>(std::floor((target[k] - grid_.lower[k]) / grid_.spacing[k]));
            lo[k] = std::max(0, j - reach_[k]);
            hi[k] = std::min(grid_.cells[k] - 1, j + reach_[k]);
            it[k] = lo[k];
        }
        const double r2 = radius_ * radius_;
        while (true) {
            std::size_t lin = 0;
            for (int k = 0; k < d; ++k) lin += static_cast<std::size_t>(it[k]) * grid_.stride[k];
            for (std::uint32_t pi : bins_[lin]) {
                const double* p = &points_[pi * stride()];
                double d2 = 0;
                for (int k = 0; k < d; ++k) {
                    const double dx = p[k] - target[k];
                    d2 += dx * dx;
                }
                if (d2 > r2) continue;
                gathered_.push_back(pi);
                const double dist = std::sqrt(d2);
                if (dist < nearest_dist_) {
                    nearest_dist_ = dist;
                    nearest_value_ = p[d];
                }
            }
            int k = 0;
            while (k < d && ++it[k] > hi[k]) { it[k] = lo[k]; ++k; }
            if (k == d) break;
        }
    }

    /// Weighted least-squares fit with `terms` monomials; returns the fitted
    /// value at the expansion point (the constant coefficient).
    bool fit(std::span<const double> target, int terms, double& value) const {
        const int d = grid_.dim;
        double normal[10 * 10] = {0};
        double rhs[10] = {0};
        double phi[10];
        for (std::uint32_t pi : gathered_) {
            const double* p = &points_[pi * stride()];
            double q2 = 0;
            for (int k = 0; k < d; ++k) {
                const double dx = (p[k] - target[k]) / radius_;
                q2 += dx * dx;
            }
            const double cut = 1.0 - q2;
            const double w = cut * cut / (q2 + 1e-4);
            // Monomial basis in scaled offsets: 1, dx_k, dx_k*dx_l (k<=l).
            int t = 0;
            phi[t++] = 1.0;
            if (terms > 1)
                for (int k = 0; k < d; ++k) phi[t++] = (p[k] - target[k]) / radius_;
            if (terms > 1 + d)
                for (int k = 0; k < d; ++k)
                    for (int l = k; l < d; ++l)
                        phi[t++] = (p[k] - target[k]) * (p[l] - target[l]) / (radius_ * radius_);
            for (int a = 0; a < terms; ++a) {
                for (int b = 0; b < terms; ++b) normal[a * terms + b] += w * phi[a] * phi[b];
                rhs[a] += w * phi[a] * p[d];
            }
        }
        // Gaussian elimination with partial pivoting.
        for (int col = 0; col < terms; ++col) {
            int piv = col;
            for (int rw = col + 1; rw < terms; ++rw)
                if (std::abs(normal[rw * terms + col]) > std::abs(normal[piv * terms + col]))
                    piv = rw;
            if (std::abs(normal[piv * terms + col]) < 1e-12) return false;
            if (piv != col) {
                for (int b = 0; b < terms; ++b)
                    std::swap(normal[col * terms + b], normal[piv * terms + b]);
                std::swap(rhs[col], rhs[piv]);
            }
            for (int rw = col + 1; rw < terms; ++rw) {
                const double f = normal[rw * terms + col] / normal[col * terms + col];
                for (int b = col; b < terms; ++b) normal[rw * terms + b] -= f * normal[col * terms + b];
                rhs[rw] -= f * rhs[col];
            }
        }
        double sol[10];
        for (int rw = terms - 1; rw >= 0; --rw) {
            double acc = rhs[rw];
            for (int b = rw + 1; b < terms; ++b) acc -= normal[rw * terms + b] * sol[b];
            sol[rw] = acc / normal[rw * terms + rw];
        }
        value = sol[0];
        return std::isfinite(value);
    }

    StructuredGrid grid_;
    double radius_;
    std::vector<int> reach_;
    std::vector<double> points_; // (x_0..x_{d-1}, value) per sample
    std::vector<std::vector<std::uint32_t>> bins_;

    mutable std::vector<std::uint32_t> gathered_;
    mutable double nearest_dist_ = 0;
    mutable double nearest_value_ = 0;
};

} // namespace hypctl::detail
