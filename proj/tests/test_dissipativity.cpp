#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hypctl/dissipativity.hpp"

using namespace hypctl;

namespace {

StructuredGrid tiny_grid() {
    const double lo[] = {0.0};
    const double hi[] = {1.0};
    const int cells[] = {2};
    return build_grid(lo, hi, cells);
}

std::vector<ScalarField> matrix_fields(const StructuredGrid& g, int n,
                                       const std::vector<double>& rowmajor) {
    std::vector<ScalarField> b;
    for (int idx = 0; idx < n * n; ++idx) b.push_back(ScalarField(g, rowmajor[idx]));
    return b;
}

std::vector<ScalarField> zero_mu(const StructuredGrid& g, int n) {
    return std::vector<ScalarField>(n, ScalarField(g, 0.0));
}

} // namespace

TEST_CASE("min_eigenvalue_symmetric: closed forms") {
    const double diag[] = {1, 0, 0, -2};
    CHECK(min_eigenvalue_symmetric(diag, 2) == Catch::Approx(-2.0).margin(1e-12));
    const double sym[] = {2, 1, 1, 2}; // eigenvalues 1 and 3
    CHECK(min_eigenvalue_symmetric(sym, 2) == Catch::Approx(1.0).margin(1e-12));
    const double zero[] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    CHECK(min_eigenvalue_symmetric(zero, 3) == 0.0);
}

TEST_CASE("min_eigenvalue_symmetric: input guards") {
    const double asym[] = {0, 1, 0, 0};
    CHECK_THROWS_AS(min_eigenvalue_symmetric(asym, 2), Error);
    const double bad[] = {std::nan(""), 0, 0, 0};
    CHECK_THROWS_AS(min_eigenvalue_symmetric(bad, 2), Error);
}

TEST_CASE("min_eigenvalue_symmetric: shift property on random matrices") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        std::vector<double> m(n * n);
        for (int p = 0; p < n; ++p)
            for (int q = p; q < n; ++q) m[p * n + q] = m[q * n + p] = uni(rng);
        const double c = uni(rng);
        auto shifted = m;
        for (int p = 0; p < n; ++p) shifted[p * n + p] += c;
        const double lhs = min_eigenvalue_symmetric(shifted, n);
        const double rhs = min_eigenvalue_symmetric(m, n) + c;
        CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
}

TEST_CASE("build_dissipation: diagonal-B mode gives D = -2B") {
    const auto g = tiny_grid();
    const auto b = matrix_fields(g, 2, {1, 0, 0, -2});
    const auto mu = zero_mu(g, 2);
    const auto choice = build_dissipation(b, mu, 2, DissipationMode::DiagonalB);
    CHECK(choice.diagonal[0].values[0] == Catch::Approx(-2.0));
    CHECK(choice.diagonal[1].values[0] == Catch::Approx(4.0));
    for (double c : choice.certificate.values) CHECK(c >= -1e-10);
}

TEST_CASE("build_dissipation: symmetric-eig mode uses the smallest eigenvalue") {
    const auto g = tiny_grid();
    const auto b = matrix_fields(g, 2, {2, 1, 1, 2}); // lambda_min = 1
    const auto mu = zero_mu(g, 2);
    const auto choice = build_dissipation(b, mu, 2, DissipationMode::SymmetricEig);
    for (int i = 0; i < 2; ++i)
        CHECK(choice.diagonal[i].values[0] == Catch::Approx(-2.0).margin(1e-12));
    for (double c : choice.certificate.values) CHECK(c >= -1e-10);
}

TEST_CASE("build_dissipation: general-Q mode on a nilpotent coupling") {
    const auto g = tiny_grid();
    const auto b = matrix_fields(g, 2, {0, 1, 0, 0});
    const auto mu = zero_mu(g, 2);
    const auto choice = build_dissipation(b, mu, 2, DissipationMode::GeneralQ);
    // Q + Q^T = [[0,1],[1,0]]; C(Q) = -lambda_min = 1.
    for (int i = 0; i < 2; ++i)
        CHECK(choice.diagonal[i].values[0] == Catch::Approx(1.0).margin(1e-12));
    for (double c : choice.certificate.values) CHECK(c >= -1e-10);
}

TEST_CASE("build_dissipation: mode preconditions") {
    const auto g = tiny_grid();
    const auto mu = zero_mu(g, 2);
    const auto off_diag = matrix_fields(g, 2, {1, 0.5, 0.5, 1});
    CHECK_THROWS_AS(build_dissipation(off_diag, mu, 2, DissipationMode::DiagonalB),
                    ValidationError);
    const auto asym = matrix_fields(g, 2, {0, 1, 0, 0});
    CHECK_THROWS_AS(build_dissipation(asym, mu, 2, DissipationMode::SymmetricEig), Error);
    // Positive-definite mode demands B^T E + E B >= 0; B = -Id fails.
    const auto neg = matrix_fields(g, 2, {-1, 0, 0, -1});
    CHECK_THROWS_AS(build_dissipation(neg, mu, 2, DissipationMode::PositiveDefinite),
                    ValidationError);
    const auto pos = matrix_fields(g, 2, {2, 1, 1, 2});
    CHECK_NOTHROW(build_dissipation(pos, mu, 2, DissipationMode::PositiveDefinite));
}

TEST_CASE("check_dissipativity: pass and fail cases") {
    const auto g = tiny_grid();
    const auto mu = zero_mu(g, 2);

    SECTION("symmetric positive semidefinite B with D = 0 passes") {
        const auto b = matrix_fields(g, 2, {2, 1, 1, 2});
        const std::vector<ScalarField> diag(2, ScalarField(g, 0.0));
        const auto rep = check_dissipativity(b, mu, diag, 2, 16);
        CHECK(rep.pass);
        CHECK(rep.worst_margin >= -1e-10);
    }
    SECTION("scalar B with D = -2B passes with zero margin") {
        const auto g1 = tiny_grid();
        const auto b = matrix_fields(g1, 1, {1.0});
        const std::vector<ScalarField> mu1{ScalarField(g1, 0.0)};
        const std::vector<ScalarField> diag{ScalarField(g1, -2.0)};
        const auto rep = check_dissipativity(b, mu1, diag, 1, 16);
        CHECK(rep.pass);
        CHECK(rep.worst_margin == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("negative scalar B with D = 0 fails with margin -2") {
        const auto g1 = tiny_grid();
        const auto b = matrix_fields(g1, 1, {-1.0});
        const std::vector<ScalarField> mu1{ScalarField(g1, 0.0)};
        const std::vector<ScalarField> diag{ScalarField(g1, 0.0)};
        const auto rep = check_dissipativity(b, mu1, diag, 1, 16);
        CHECK(!rep.pass);
        CHECK(rep.worst_margin == Catch::Approx(-2.0).margin(1e-12));
    }
    SECTION("random probes never contradict the eigenvalue certificate") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> uni(-1.5, 1.5);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<double> bm(9);
            for (auto& v : bm) v = uni(rng);
            const auto b = matrix_fields(g, 3, bm);
            const std::vector<ScalarField> diag(3, ScalarField(g, uni(rng)));
            const auto mu3 = zero_mu(g, 3);
            const auto rep = check_dissipativity(b, mu3, diag, 3, 32);
            CHECK(rep.worst_probe_margin >= rep.worst_margin - 1e-10);
        }
    }
}

TEST_CASE("scalar B: diagonal-B and symmetric-eig modes coincide") {
    const auto g = tiny_grid();
    const double bval = -0.7;
    const auto b = matrix_fields(g, 2, {bval, 0, 0, bval});
    const auto mu = zero_mu(g, 2);
    const auto d_diag = build_dissipation(b, mu, 2, DissipationMode::DiagonalB);
    const auto d_sym = build_dissipation(b, mu, 2, DissipationMode::SymmetricEig);
    for (int i = 0; i < 2; ++i)
        for (std::size_t c = 0; c < g.cell_count; ++c)
            CHECK(d_diag.diagonal[i].values[c] ==
                  Catch::Approx(d_sym.diagonal[i].values[c]).margin(1e-11));
}
