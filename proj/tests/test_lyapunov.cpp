#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hypctl/dissipativity.hpp"
#include "hypctl/lyapunov.hpp"
#include "hypctl/weights.hpp"

using namespace hypctl;

namespace {

StructuredGrid square(int m) {
    const double lo[] = {0.0, 0.0};
    const double hi[] = {1.0, 1.0};
    const int cells[] = {m, m};
    return build_grid(lo, hi, cells);
}

StructuredGrid segment(int m) {
    const double lo[] = {0.0};
    const double hi[] = {1.0};
    const int cells[] = {m};
    return build_grid(lo, hi, cells);
}

WeightField weights_from(const StructuredGrid& g, int n,
                         const std::function<double(int, std::span<const double>)>& mu,
                         double c_l = 1.0) {
    const std::vector<double> cls(n, c_l);
    return weight_field_from_function(g, n, mu, cls);
}

} // namespace

TEST_CASE("lyapunov_value") {
    SECTION("constant two-component state with flat weights") {
        const auto g = square(8);
        const auto weights = weights_from(g, 2, [](int, std::span<const double>) { return 0.0; });
        StateField w(g, 2);
        for (int i = 0; i < 2; ++i)
            for (double& v : w.comp[i].values) v = 1.0;
        CHECK(lyapunov_value(w, weights) == Catch::Approx(2.0).margin(1e-13));
    }
    SECTION("zero state") {
        const auto g = square(8);
        const auto weights = weights_from(g, 1, [](int, std::span<const double>) { return 0.0; });
        StateField w(g, 1);
        CHECK(lyapunov_value(w, weights) == 0.0);
    }
    SECTION("midpoint quadrature of exp(-x) on [0,1]") {
        const auto g = segment(64);
        const auto weights =
            weights_from(g, 1, [](int, std::span<const double> x) { return -x[0]; });
        StateField w(g, 1);
        for (double& v : w.comp[0].values) v = 1.0;
        const double exact = 1.0 - std::exp(-1.0);
        const double h = g.spacing[0];
        CHECK(std::abs(lyapunov_value(w, weights) - exact) <= 0.05 * h * h);
    }
    SECTION("norm equivalence brackets L between exp(min mu) and exp(max mu)") {
        const auto g = square(12);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            const double slope = uni(rng), offset = uni(rng);
            const auto weights = weights_from(g, 1, [&](int, std::span<const double> x) {
                return slope * x[0] + offset * x[1];
            });
            StateField w = sample_state(g, 1, [&](int, std::span<const double> x) {
                return std::sin(5 * x[0] * x[1]) + uni(rng) * 0.01;
            });
            const double l = lyapunov_value(w, weights);
            const double norm2 = state_norm_squared(w);
            CHECK(l >= std::exp(weights.mu_min()) * norm2 - 1e-12);
            CHECK(l <= std::exp(weights.mu_max()) * norm2 + 1e-12);
        }
    }
}

TEST_CASE("volume_term") {
    SECTION("zero state gives zero") {
        const auto g = square(8);
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        const auto weights = weights_from(g, 1, [](int, std::span<const double>) { return 0.0; });
        StateField w(g, 1);
        CHECK(volume_term(w, cs, weights) == 0.0);
    }
    SECTION("B = 0: volume term equals the residual-weighted quadrature") {
        const auto g = square(24);
        auto cs = make_constant_coefficients(g, {{0.8, -0.3}});
        const double c_l = 1.4;
        const auto weights = weights_from(
            g, 1, [](int, std::span<const double> x) { return -x[0] + 0.5 * x[1] * x[1]; }, c_l);
        const StateField w = sample_state(g, 1, [](int, std::span<const double> x) {
            return std::cos(2 * x[0]) * (1 + x[1]);
        });
        const ScalarField d_zero(g, 0.0);
        const auto res = weight_residual(weights.mu[0], cs, 0, d_zero, c_l);
        // I = sum_i int w_i^2 (r_i - C_L) e^{mu_i} when B = 0 and D = 0.
        double expect = 0;
        for (std::size_t c = 0; c < g.cell_count; ++c)
            expect += w.comp[0].values[c] * w.comp[0].values[c] *
                      (res.cellwise.values[c] - c_l) * std::exp(weights.mu[0].values[c]);
        expect *= g.cell_volume();
        const double got = volume_term(w, cs, weights);
        CHECK(got == Catch::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("source_term") {
    SECTION("B = 0 gives zero") {
        const auto g = square(8);
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}});
        const auto weights = weights_from(g, 1, [](int, std::span<const double>) { return 0.0; });
        const StateField w =
            sample_state(g, 1, [](int, std::span<const double> x) { return 1 + x[0]; });
        CHECK(source_term(w, cs, weights) == 0.0);
    }
    SECTION("scalar example: B = 1, w = 1, flat weights on [0,1]") {
        const auto g = segment(16);
        auto cs = make_constant_coefficients(g, {{1.0}}, {1.0});
        const auto weights = weights_from(g, 1, [](int, std::span<const double>) { return 0.0; });
        StateField w(g, 1);
        for (double& v : w.comp[0].values) v = 1.0;
        CHECK(source_term(w, cs, weights) == Catch::Approx(-2.0).margin(1e-13));
    }
    SECTION("S <= int w^T D E w for an accepted dissipation choice") {
        const auto g = square(6);
        // Symmetric B, equal weights across components (the regime mode (ii)
        // certifies), random states.
        auto cs = make_constant_coefficients(g, {{1.0, 0.0}, {0.0, 1.0}},
                                             {0.4, -0.6, -0.6, 1.1});
        const auto weights = weights_from(g, 2, [](int, std::span<const double> x) {
            return 0.3 * x[0] - 0.2 * x[1];
        });
        const auto choice =
            build_dissipation(cs.coupling, weights.mu, 2, DissipationMode::SymmetricEig);
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            StateField w(g, 2);
            for (int i = 0; i < 2; ++i)
                for (double& v : w.comp[i].values) v = uni(rng);
            const double s = source_term(w, cs, weights);
            double bound = 0;
            for (std::size_t c = 0; c < g.cell_count; ++c)
                for (int i = 0; i < 2; ++i)
                    bound += w.comp[i].values[c] * w.comp[i].values[c] *
                             choice.diagonal[i].values[c] * std::exp(weights.mu[i].values[c]);
            bound *= g.cell_volume();
            CHECK(s <= bound + 1e-10);
        }
    }
}

TEST_CASE("trace recording enforces its invariants") {
    LyapunovTrace trace;
    trace.record({0.0, 1.0, 0, 0, 0, 0});
    CHECK_THROWS_AS(trace.record({0.0, 0.9, 0, 0, 0, 0}), Error); // t must increase
    TraceSample bad;
    bad.t = 1.0;
    bad.lyapunov = -0.1;
    CHECK_THROWS_AS(trace.record(bad), Error); // L >= 0
}

TEST_CASE("fit_decay_rate") {
    auto make_trace = [](const std::function<double(double)>& l, double t_max, double dt) {
        LyapunovTrace trace;
        for (double t = 0; t <= t_max + 1e-12; t += dt)
            trace.record({t, l(t), 0, 0, 0, 0});
        return trace;
    };

    SECTION("exact exponential is recovered exactly") {
        const auto trace = make_trace([](double t) { return std::exp(-3.0 * t); }, 2.0, 0.05);
        const auto fit = fit_decay_rate(trace, 0.2, 1.8);
        CHECK(fit.rate_on_l == Catch::Approx(3.0).margin(1e-10));
        CHECK(fit.rate_on_norm == Catch::Approx(1.5).margin(1e-10));
    }
    SECTION("a prefactor only shifts the intercept") {
        const auto trace = make_trace([](double t) { return 5.0 * std::exp(-2.0 * t); }, 2.0, 0.05);
        const auto fit = fit_decay_rate(trace, 0.2, 1.8);
        CHECK(fit.rate_on_l == Catch::Approx(2.0).margin(1e-10));
    }
    SECTION("mild multiplicative noise keeps the rate within 2%") {
        const auto trace = make_trace(
            [](double t) { return std::exp(-t) * (1.0 + 0.01 * std::sin(t)); }, 3.0, 0.05);
        const auto fit = fit_decay_rate(trace, 0.3, 2.7);
        CHECK(fit.rate_on_l >= 0.98);
        CHECK(fit.rate_on_l <= 1.02);
    }
    SECTION("fully decayed window returns the +infinity sentinel") {
        LyapunovTrace trace;
        trace.record({0.0, 1.0, 0, 0, 0, 0});
        trace.record({1.0, 0.0, 0, 0, 0, 0});
        trace.record({2.0, 0.0, 0, 0, 0, 0});
        trace.record({3.0, 0.0, 0, 0, 0, 0});
        const auto fit = fit_decay_rate(trace, 0.5, 3.0);
        CHECK(std::isinf(fit.rate_on_l));
    }
    SECTION("too few positive samples is an error") {
        LyapunovTrace trace;
        trace.record({0.0, 1.0, 0, 0, 0, 0});
        trace.record({1.0, 0.5, 0, 0, 0, 0});
        CHECK_THROWS_AS(fit_decay_rate(trace, 0.0, 1.0), Error);
    }
}
