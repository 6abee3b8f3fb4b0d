#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hypctl/boundary.hpp"
#include "hypctl/coefficients.hpp"
#include "hypctl/weights.hpp"

using namespace hypctl;

namespace {

StructuredGrid square(int m) {
    const double lo[] = {0.0, 0.0};
    const double hi[] = {1.0, 1.0};
    const int cells[] = {m, m};
    return build_grid(lo, hi, cells);
}

WeightField flat_weights(const StructuredGrid& g, int n, double c_l = 1.0) {
    std::vector<double> cls(n, c_l);
    return weight_field_from_function(
        g, n, [](int, std::span<const double>) { return 0.0; }, cls);
}

std::vector<std::size_t> faces_on(const BoundaryPartition& part, int axis, int side) {
    std::vector<std::size_t> ids;
    for (std::size_t f = 0; f < part.faces.size(); ++f)
        if (part.faces[f].axis == axis && part.faces[f].side == side) ids.push_back(f);
    return ids;
}

} // namespace

TEST_CASE("partition_boundary: sign conventions") {
    const auto g = square(4);

    SECTION("a=(1,0): tangential faces count as outflow") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        const auto part = partition_boundary(cs, flat_weights(g, 1));
        for (std::size_t f : faces_on(part, 0, 1)) CHECK(part.is_outflow(0, f));
        for (std::size_t f : faces_on(part, 1, 0)) CHECK(part.is_outflow(0, f));
        for (std::size_t f : faces_on(part, 1, 1)) CHECK(part.is_outflow(0, f));
        for (std::size_t f : faces_on(part, 0, 0)) CHECK(part.is_controlled(0, f));
    }
    SECTION("a=(-1,-1): inflow on the upper faces") {
        auto cs = make_constant_coefficients(g, {{-1.0, -1.0}});
        const auto part = partition_boundary(cs, flat_weights(g, 1));
        for (std::size_t f : faces_on(part, 0, 1)) CHECK(part.is_controlled(0, f));
        for (std::size_t f : faces_on(part, 1, 1)) CHECK(part.is_controlled(0, f));
        for (std::size_t f : faces_on(part, 0, 0)) CHECK(part.is_outflow(0, f));
        for (std::size_t f : faces_on(part, 1, 0)) CHECK(part.is_outflow(0, f));
    }
    SECTION("1-D upwind inflow/outflow") {
        const double lo[] = {0.0};
        const double hi[] = {1.0};
        const int cells[] = {4};
        const auto g1 = build_grid(lo, hi, cells);
        auto cs = make_constant_coefficients(g1, {{1.0}});
        const auto part = partition_boundary(cs, flat_weights(g1, 1));
        REQUIRE(part.faces.size() == 2);
        for (std::size_t f = 0; f < 2; ++f) {
            if (part.faces[f].side == 0) CHECK(part.is_controlled(0, f));
            else CHECK(part.is_outflow(0, f));
        }
    }
    SECTION("selecting an outflow face for control is rejected") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        const auto outflow_ids = faces_on(partition_boundary(cs, flat_weights(g, 1)), 0, 1);
        std::vector<FaceSelection> sel(1);
        sel[0] = outflow_ids;
        CHECK_THROWS_AS(partition_boundary(cs, flat_weights(g, 1), sel), ValidationError);
    }
    SECTION("classes are invariant under positive rescaling of a") {
        auto cs1 = make_constant_coefficients(g, {{0.3, -0.7}});
        auto cs2 = make_constant_coefficients(g, {{3.0, -7.0}});
        const auto p1 = partition_boundary(cs1, flat_weights(g, 1));
        const auto p2 = partition_boundary(cs2, flat_weights(g, 1));
        for (std::size_t f = 0; f < p1.faces.size(); ++f)
            CHECK(p1.face_class[0][f] == p2.face_class[0][f]);
    }
    SECTION("explicit selection: unselected inflow faces become zero faces") {
        auto cs = make_constant_coefficients(g, {{1.0, 1.0}});
        const auto all = partition_boundary(cs, flat_weights(g, 1));
        const auto left = faces_on(all, 0, 0);
        std::vector<FaceSelection> sel(1);
        sel[0] = left; // control only x_1 = 0; the x_2 = 0 inflow faces get w = 0
        const auto part = partition_boundary(cs, flat_weights(g, 1), sel);
        for (std::size_t f : faces_on(part, 0, 0)) CHECK(part.is_controlled(0, f));
        for (std::size_t f : faces_on(part, 1, 0))
            CHECK(part.face_class[0][f] == FaceClass::Zero);
    }
}

TEST_CASE("outflow_functional") {
    const auto g = square(8);
    auto cs = make_constant_coefficients(g, {{1.0, 0.0}});

    SECTION("zero state") {
        const auto part = partition_boundary(cs, flat_weights(g, 1));
        StateField w(g, 1);
        CHECK(outflow_functional(w, part) == 0.0);
    }
    SECTION("constant state, flat weights: integral is w^2 * a.n") {
        const auto part = partition_boundary(cs, flat_weights(g, 1));
        StateField w(g, 1);
        for (double& v : w.comp[0].values) v = 2.0;
        CHECK(outflow_functional(w, part) == Catch::Approx(4.0).margin(1e-13));
    }
    SECTION("mu = -x_1 weights the outflow face by e^{-1}") {
        const double a[] = {1.0, 0.0};
        std::vector<WeightComponent> comps{solve_weight_constant(a, 1.0, nullptr, g)};
        const auto weights = assemble_weights(std::move(comps));
        const auto part = partition_boundary(cs, weights);
        StateField w(g, 1);
        for (double& v : w.comp[0].values) v = 1.0;
        // Tangential faces carry a.n = 0 exactly, so only x_1 = 1 contributes.
        CHECK(outflow_functional(w, part) == Catch::Approx(std::exp(-1.0)).margin(1e-13));
    }
}

TEST_CASE("control_gain") {
    const auto g = square(8);

    SECTION("single component, unit speed: G = 1") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        const auto part = partition_boundary(cs, flat_weights(g, 1));
        CHECK(control_gain(part) == Catch::Approx(1.0).margin(1e-13));
    }
    SECTION("mu = -x_1 vanishes on the controlled face: G stays 1") {
        const double a[] = {1.0, 0.0};
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        std::vector<WeightComponent> comps{solve_weight_constant(a, 1.0, nullptr, g)};
        const auto part = partition_boundary(cs, assemble_weights(std::move(comps)));
        CHECK(control_gain(part) == Catch::Approx(1.0).margin(1e-13));
    }
    SECTION("two components sharing the controlled set: G = 1/2") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}, {1.0, 0.0}});
        const auto part = partition_boundary(cs, flat_weights(g, 2));
        CHECK(control_gain(part) == Catch::Approx(0.5).margin(1e-13));
    }
    SECTION("empty controlled set: no control authority") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        std::vector<FaceSelection> sel(1);
        sel[0] = std::vector<std::size_t>{}; // all inflow demoted to zero faces
        const auto part = partition_boundary(cs, flat_weights(g, 1), sel);
        CHECK_THROWS_AS(control_gain(part), ControlError);
    }
}

TEST_CASE("synthesize_control and verify_control") {
    const auto g = square(8);

    SECTION("zero state needs zero control") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        const auto part = partition_boundary(cs, flat_weights(g, 1));
        StateField w(g, 1);
        const auto u = synthesize_control(w, part, ControlMode::SharpEquality);
        CHECK(u.u_max == 0.0);
        const auto rep = verify_control(u, w, part);
        CHECK(rep.pass);
        CHECK(rep.margin == 0.0);
    }
    SECTION("uniform state passes through unchanged: u equals the state") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        const auto part = partition_boundary(cs, flat_weights(g, 1));
        StateField w(g, 1);
        for (double& v : w.comp[0].values) v = 2.0;
        const auto u = synthesize_control(w, part, ControlMode::SharpEquality);
        CHECK(u.u_max == Catch::Approx(2.0).margin(1e-13));
    }
    SECTION("outflow 4 at gain 1/2 with theta = 1 gives u = sqrt(2)") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}, {1.0, 0.0}});
        const auto part = partition_boundary(cs, flat_weights(g, 2));
        StateField w(g, 2);
        for (int i = 0; i < 2; ++i)
            for (double& v : w.comp[i].values) v = std::sqrt(2.0);
        REQUIRE(outflow_functional(w, part) == Catch::Approx(4.0).margin(1e-12));
        REQUIRE(control_gain(part) == Catch::Approx(0.5).margin(1e-13));
        const auto u = synthesize_control(w, part, ControlMode::SingleScalar, 1.0);
        CHECK(u.u_max == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    }
    SECTION("sharp signal has zero margin; doubling it fails; shrinking keeps pass") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.5}});
        const auto part = partition_boundary(cs, flat_weights(g, 1));
        StateField w = sample_state(
            g, 1, [](int, std::span<const double> x) { return 1.0 + x[0] * x[1]; });
        auto u = synthesize_control(w, part, ControlMode::SharpEquality);
        const auto rep = verify_control(u, w, part);
        CHECK(rep.pass);
        CHECK(std::abs(rep.margin) <= 1e-12 * (std::abs(rep.rhs) + 1.0));
        CHECK(boundary_term(w, part, u) == rep.margin);

        auto doubled = u;
        for (auto& comp : doubled.face_value)
            for (double& v : comp) v *= 2.0;
        CHECK(!verify_control(doubled, w, part).pass);

        // Monotonicity: decreasing any |u_i| pointwise never turns pass into fail.
        auto shrunk = u;
        for (auto& comp : shrunk.face_value)
            for (double& v : comp) v *= 0.37;
        CHECK(verify_control(shrunk, w, part).pass);
        CHECK(verify_control(shrunk, w, part).margin >= 0.0);
    }
    SECTION("all four modes satisfy the inequality and agree on the value") {
        auto cs = make_constant_coefficients(g, {{1.0, 0.25}, {0.5, 1.0}});
        const auto part = partition_boundary(cs, flat_weights(g, 2));
        StateField w = sample_state(g, 2, [](int i, std::span<const double> x) {
            return (i + 1) * (0.5 + x[0]) * (1.0 - 0.3 * x[1]);
        });
        for (ControlMode mode : {ControlMode::PerFace, ControlMode::PerComponent,
                                 ControlMode::SingleScalar, ControlMode::SharpEquality}) {
            const double theta = mode == ControlMode::SharpEquality ? 1.0 : 0.9;
            const auto u = synthesize_control(w, part, mode, theta);
            const auto rep = verify_control(u, w, part);
            CHECK(rep.pass);
            // The proportional budget rule makes u^2 = theta G F in every mode.
            const double expect =
                std::sqrt(theta * control_gain(part) * outflow_functional(w, part));
            CHECK(u.u_max == Catch::Approx(expect).margin(1e-12));
            if (mode == ControlMode::SharpEquality)
                CHECK(std::abs(rep.margin) <= 1e-12 * (rep.rhs + 1.0));
            else
                CHECK(rep.margin >= 0.0);
        }
    }
}
