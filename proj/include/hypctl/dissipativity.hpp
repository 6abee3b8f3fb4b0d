#pragma once

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hypctl/field.hpp"
#include "hypctl/grid.hpp"

namespace hypctl {

namespace detail {

/// Cyclic Jacobi sweeps on a dense symmetric matrix (row-major, overwritten).
/// Rotations target (p, q) in a fixed row-major order until the off-diagonal
/// Frobenius norm drops below tol_factor * ||M||_F. Sizes here are tiny
/// (n <= 16), where Jacobi is both fast and bit-reproducible.
inline void jacobi_diagonalize(std::span<double> m, int n, double tol_factor = 1e-12) {
    auto off_norm = [&]() {
        double s = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) s += 2 * m[p * n + q] * m[p * n + q];
        return std::sqrt(s);
    };
    double frob = 0;
    for (int idx = 0; idx < n * n; ++idx) frob += m[idx] * m[idx];
    frob = std::sqrt(frob);
    const double target = tol_factor * std::max(frob, 1e-300);
    for (int sweep = 0; sweep < 64 && off_norm() > target; ++sweep) {
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m[p * n + q];
                if (apq == 0.0) continue;
                const double diff = m[q * n + q] - m[p * n + p];
                double t;
                if (std::abs(apq) < 1e-300 * std::abs(diff)) {
                    t = apq / diff;
                } else {
                    const double theta = diff / (2 * apq);
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m[k * n + p], mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m[p * n + k], mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
}

inline std::vector<double> symmetric_eigenvalues(std::span<const double> m, int n) {
    std::vector<double> work(m.begin(), m.end());
    jacobi_diagonalize(work, n);
    std::vector<double> eig(n);
    for (int k = 0; k < n; ++k) eig[k] = work[k * n + k];
    return eig;
}

} // namespace detail

/// Smallest eigenvalue of a (nearly) symmetric matrix. Symmetrized up front;
/// asymmetry beyond 1e-12 * scale is rejected.
inline double min_eigenvalue_symmetric(std::span<const double> m, int n) {
    std::vector<double> sym(static_cast<std::size_t>(n) * n);
    double scale = 1.0;
    for (int idx = 0; idx < n * n; ++idx) {
        if (!std::isfinite(m[idx])) throw Error("min_eigenvalue_symmetric: non-finite entry");
        scale = std::max(scale, std::abs(m[idx]));
    }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (std::abs(m[p * n + q] - m[q * n + p]) > 1e-12 * scale)
                throw Error("min_eigenvalue_symmetric: matrix is not symmetric");
            sym[p * n + q] = 0.5 * (m[p * n + q] + m[q * n + p]);
        }
    const auto eig = detail::symmetric_eigenvalues(sym, n);
    double mn = eig[0];
    for (double v : eig) mn = std::min(mn, v);
    return mn;
}

enum class DissipationMode { GeneralQ, SymmetricEig, DiagonalB, PositiveDefinite };

inline const char* to_string(DissipationMode m) {
    switch (m) {
        case DissipationMode::GeneralQ: return "general-Q";
        case DissipationMode::SymmetricEig: return "symmetric-eig";
        case DissipationMode::DiagonalB: return "diagonal-B";
        case DissipationMode::PositiveDefinite: return "positive-definite";
    }
    return "?";
}

/// Diagonal matrix D certifying  -v^T (B^T E + E B) v <= v^T D E v  pointwise.
struct DissipationChoice {
    DissipationMode mode = DissipationMode::DiagonalB;
    std::vector<ScalarField> diagonal; // D_ii per component
    ScalarField certificate;           // min eigenvalue of D E + B^T E + E B per cell
};

namespace detail {

inline void fill_form_matrix(std::span<const ScalarField> b, std::span<const double> d_diag,
                             std::span<const double> mu, int n, std::size_t cell,
                             std::span<double> out) {
    // D E + B^T E + E B (symmetric because D E is diagonal).
    for (int i = 0; i < n; ++i) {
        const double ei = std::exp(mu[i]);
        for (int j = 0; j < n; ++j) {
            const double ej = std::exp(mu[j]);
            double v = b[static_cast<std::size_t>(j) * n + i].values[cell] * ej + // (B^T E)_ij
                       ei * b[static_cast<std::size_t>(i) * n + j].values[cell];  // (E B)_ij
            if (i == j) v += d_diag[i] * ei;
            out[i * n + j] = v;
        }
    }
}

} // namespace detail

/// D_ii fields for the modes that do not consult the weights:
/// symmetric-eig (D = -2 lambda_min(B) Id), diagonal-B (D = -2 B), and
/// positive-definite (D = 0). Used by scenario factories, which need D before
/// the weight equation can be solved; the certificate is checked afterwards
/// via build_dissipation / check_dissipativity.
inline std::vector<ScalarField> dissipation_diagonal(std::span<const ScalarField> b, int n,
                                                     DissipationMode mode,
                                                     const StructuredGrid& grid) {
    std::vector<ScalarField> d(static_cast<std::size_t>(n), ScalarField(grid, 0.0));
    std::vector<double> mat(static_cast<std::size_t>(n) * n);
    for (std::size_t c = 0; c < grid.cell_count; ++c) {
        switch (mode) {
            case DissipationMode::DiagonalB: {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (i != j && std::abs(b[static_cast<std::size_t>(i) * n + j].values[c]) > 1e-12)
                            throw ValidationError("dissipation mode diagonal-B: B has an "
                                                  "off-diagonal entry at cell " + std::to_string(c));
                for (int i = 0; i < n; ++i)
                    d[i].values[c] = -2.0 * b[static_cast<std::size_t>(i) * n + i].values[c];
                break;
            }
            case DissipationMode::SymmetricEig: {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        mat[i * n + j] = b[static_cast<std::size_t>(i) * n + j].values[c];
                const double lmin = min_eigenvalue_symmetric(mat, n); // throws if not symmetric
                for (int i = 0; i < n; ++i) d[i].values[c] = -2.0 * lmin;
                break;
            }
            case DissipationMode::PositiveDefinite: {
                // D = 0; positive semidefiniteness is verified by the certificate.
                break;
            }
            case DissipationMode::GeneralQ:
                throw Error("dissipation_diagonal: general-Q needs the weights; "
                            "use build_dissipation");
        }
    }
    return d;
}

/// Pointwise certificate field: min eigenvalue of D E + B^T E + E B per cell.
inline ScalarField dissipation_certificate(std::span<const ScalarField> b,
                                           std::span<const ScalarField> mu,
                                           std::span<const ScalarField> d_diag, int n) {
    const StructuredGrid& grid = mu[0].grid;
    ScalarField cert(grid, 0.0);
    std::vector<double> form(static_cast<std::size_t>(n) * n), mu_c(n), d_c(n);
    for (std::size_t c = 0; c < grid.cell_count; ++c) {
        for (int i = 0; i < n; ++i) {
            mu_c[i] = mu[i].values[c];
            d_c[i] = d_diag[i].values[c];
        }
        detail::fill_form_matrix(b, d_c, mu_c, n, c, form);
        cert.values[c] = min_eigenvalue_symmetric(form, n);
    }
    return cert;
}

/// Full construction of D per Remark-4-style estimates, with the pointwise
/// certificate  min eig(D E + B^T E + E B) >= 0  evaluated on the spot.
/// `mu` are the weight exponents (E = diag(exp(mu_i))).
inline DissipationChoice build_dissipation(std::span<const ScalarField> b,
                                           std::span<const ScalarField> mu, int n,
                                           DissipationMode mode) {
    if (static_cast<int>(mu.size()) != n || static_cast<int>(b.size()) != n * n)
        throw Error("build_dissipation: field counts inconsistent with n");
    const StructuredGrid& grid = mu[0].grid;
    DissipationChoice out;
    out.mode = mode;
    out.certificate = ScalarField(grid, 0.0);

    if (mode == DissipationMode::GeneralQ) {
        out.diagonal.assign(static_cast<std::size_t>(n), ScalarField(grid, 0.0));
        std::vector<double> q(static_cast<std::size_t>(n) * n);
        for (std::size_t c = 0; c < grid.cell_count; ++c) {
            // Q = E^{-1/2} B^T E^{1/2}; the estimate constant is
            // C(Q) = lambda_max(-(Q + Q^T)) = -lambda_min(Q + Q^T).
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double qij = std::exp(0.5 * (mu[j].values[c] - mu[i].values[c])) *
                                       b[static_cast<std::size_t>(j) * n + i].values[c];
                    q[i * n + j] = qij;
                }
            std::vector<double> sym(static_cast<std::size_t>(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) sym[i * n + j] = q[i * n + j] + q[j * n + i];
            const double cq = -min_eigenvalue_symmetric(sym, n);
            for (int i = 0; i < n; ++i) out.diagonal[i].values[c] = cq;
        }
    } else {
        out.diagonal = dissipation_diagonal(b, n, mode, grid);
    }

    // Pointwise certificate; a negative value means the mode's estimate does
    // not hold for these weights (construction bug guard / mode misuse).
    out.certificate = dissipation_certificate(b, mu, out.diagonal, n);
    for (std::size_t c = 0; c < grid.cell_count; ++c)
        if (out.certificate.values[c] < -1e-10)
            throw ValidationError(std::string("build_dissipation: certificate negative (") +
                                  std::to_string(out.certificate.values[c]) + ") at cell " +
                                  std::to_string(c) + " for mode " + to_string(mode));
    return out;
}

struct DissipativityReport {
    bool pass = false;
    double worst_margin = 0;
    std::size_t worst_cell = 0;
    double worst_probe_margin = 0;
};

/// Verifies assumption-style dissipativity for an explicit diagonal D:
/// exact check via the minimum eigenvalue of D E + B^T E + E B per cell plus
/// `sample_count` random unit-vector probes as a redundant cross-check.
inline DissipativityReport check_dissipativity(std::span<const ScalarField> b,
                                               std::span<const ScalarField> mu,
                                               std::span<const ScalarField> d_diag, int n,
                                               int sample_count = 8, unsigned seed = 0x5eed) {
    const StructuredGrid& grid = mu[0].grid;
    DissipativityReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    rep.worst_probe_margin = std::numeric_limits<double>::infinity();
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> form(static_cast<std::size_t>(n) * n), mu_c(n), d_c(n), v(n);
    for (std::size_t c = 0; c < grid.cell_count; ++c) {
        for (int i = 0; i < n; ++i) {
            mu_c[i] = mu[i].values[c];
            d_c[i] = d_diag[i].values[c];
        }
        detail::fill_form_matrix(b, d_c, mu_c, n, c, form);
        const double margin = min_eigenvalue_symmetric(form, n);
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_cell = c;
        }
        for (int s = 0; s < sample_count; ++s) {
            double norm2 = 0;
            for (int i = 0; i < n; ++i) {
                v[i] = gauss(rng);
                norm2 += v[i] * v[i];
            }
            if (norm2 < 1e-30) continue;
            double quad = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) quad += v[i] * form[i * n + j] * v[j];
            rep.worst_probe_margin = std::min(rep.worst_probe_margin, quad / norm2);
        }
    }
    if (sample_count <= 0) rep.worst_probe_margin = rep.worst_margin;
    rep.pass = rep.worst_margin >= -1e-10;
    return rep;
}

} // namespace hypctl
