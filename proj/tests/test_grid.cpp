#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hypctl/field.hpp"
#include "hypctl/grid.hpp"

using namespace hypctl;

namespace {

StructuredGrid unit_square(int m) {
    const double lo[] = {0.0, 0.0};
    const double hi[] = {1.0, 1.0};
    const int cells[] = {m, m};
    return build_grid(lo, hi, cells);
}

} // namespace

TEST_CASE("build_grid: 2-D box geometry") {
    const auto g = unit_square(4);
    CHECK(g.cell_count == 16);
    CHECK(g.spacing[0] == 0.25);
    CHECK(g.spacing[1] == 0.25);
    CHECK(boundary_face_count(g) == 16);
    CHECK(boundary_faces(g).size() == 16);
}

TEST_CASE("build_grid: 1-D degenerate case") {
    const double lo[] = {0.0};
    const double hi[] = {2.0};
    const int cells[] = {8};
    const auto g = build_grid(lo, hi, cells);
    CHECK(g.cell_count == 8);
    CHECK(g.spacing[0] == 0.25);
    CHECK(boundary_faces(g).size() == 2);
    // 1-D faces are points of unit measure.
    for (const auto& f : boundary_faces(g)) CHECK(f.area == 1.0);
}

TEST_CASE("build_grid: 3-D face count") {
    const double lo[] = {0.0, 0.0, 0.0};
    const double hi[] = {1.0, 1.0, 1.0};
    const int cells[] = {2, 2, 2};
    const auto g = build_grid(lo, hi, cells);
    CHECK(g.cell_count == 8);
    CHECK(boundary_faces(g).size() == 24);
}

TEST_CASE("build_grid: rejects bad axes") {
    const double lo[] = {0.0};
    const double hi_bad[] = {0.0};
    const double hi[] = {1.0};
    const int cells[] = {4};
    const int cells_bad[] = {1};
    CHECK_THROWS_AS(build_grid(lo, hi_bad, cells), Error);
    CHECK_THROWS_AS(build_grid(lo, hi, cells_bad), Error);
}

TEST_CASE("boundary faces cover the box surface exactly once") {
    const double lo[] = {0.0, -1.0, 2.0};
    const double hi[] = {2.0, 1.0, 2.5};
    const int cells[] = {5, 4, 3};
    const auto g = build_grid(lo, hi, cells);
    const auto faces = boundary_faces(g);
    CHECK(faces.size() == boundary_face_count(g));
    double area = 0;
    for (const auto& f : faces) area += f.area;
    // Surface area of the box.
    const double ext[] = {2.0, 2.0, 0.5};
    const double expected = 2 * (ext[0] * ext[1] + ext[0] * ext[2] + ext[1] * ext[2]);
    CHECK(area == Catch::Approx(expected).epsilon(1e-13));

    // Each face id maps back to itself through face_index.
    for (std::size_t f = 0; f < faces.size(); ++f)
        CHECK(face_index(g, faces[f].axis, faces[f].side, faces[f].adjacent_cell) == f);
}

TEST_CASE("cell centers are reproducible and strictly interior") {
    const auto g = unit_square(4);
    for (std::size_t c = 0; c < g.cell_count; ++c) {
        const auto x = g.cell_center(c);
        for (int k = 0; k < g.dim; ++k) {
            CHECK(x[k] > g.lower[k]);
            CHECK(x[k] < g.upper[k]);
        }
    }
    CHECK(g.center(0, 0) == 0.125);
    CHECK(g.center(0, 3) == 0.875);
}

TEST_CASE("sample_field reproduces values at cell centers") {
    const double lo1[] = {0.0};
    const double hi1[] = {1.0};
    const int cells1[] = {2};
    const auto g1 = build_grid(lo1, hi1, cells1);

    SECTION("zero function") {
        const auto f = sample_field(g1, [](std::span<const double>) { return 0.0; });
        for (double v : f.values) CHECK(v == 0.0);
    }
    SECTION("x_1 on [0,1] with m=2") {
        const auto f = sample_field(g1, [](std::span<const double> x) { return x[0]; });
        CHECK(f.values[0] == 0.25);
        CHECK(f.values[1] == 0.75);
    }
    SECTION("x_1 + x_2 on the unit square") {
        const auto g = unit_square(2);
        const auto f = sample_field(g, [](std::span<const double> x) { return x[0] + x[1]; });
        CHECK(f.values[0] == Catch::Approx(0.5));
        CHECK(f.values[1] == Catch::Approx(1.0));
        CHECK(f.values[2] == Catch::Approx(1.0));
        CHECK(f.values[3] == Catch::Approx(1.5));
    }
    SECTION("read-back is the identity at centers") {
        const auto g = unit_square(7);
        auto fn = [](std::span<const double> x) { return std::sin(3 * x[0]) + x[1] * x[1]; };
        const auto f = sample_field(g, fn);
        for (std::size_t c = 0; c < g.cell_count; ++c)
            CHECK(f.values[c] == fn(g.cell_center(c)));
    }
    SECTION("non-finite sample is rejected") {
        CHECK_THROWS_AS(
            sample_field(g1, [](std::span<const double> x) { return 1.0 / (x[0] - 0.25); }),
            Error);
    }
}
