#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hypctl/boundary.hpp"
#include "hypctl/coefficients.hpp"
#include "hypctl/dissipativity.hpp"
#include "hypctl/field.hpp"
#include "hypctl/grid.hpp"
#include "hypctl/weights.hpp"

namespace hypctl {

/// Everything needed to run one stabilization problem: geometry, coefficients,
/// weights, dissipation, boundary partition, feedback configuration and
/// initial data.
struct Scenario {
    StructuredGrid grid;
    int n = 0;
    CoefficientSet coeffs;
    WeightField weights;
    DissipationChoice dissipation;
    BoundaryPartition partition;
    StateField initial;
    ControlMode control_mode = ControlMode::SingleScalar;
    double theta = 1.0;
    double t_final = 1.0;
    double cfl_factor = 0.5;
    double weight_tol = 0; // residual gate; 0 means 10 * max h_k
    std::string fingerprint;

    double weight_tolerance() const {
        return weight_tol > 0 ? weight_tol : 10.0 * grid.max_spacing();
    }

    double c_l() const { return weights.c_l_min(); }
};

struct ValidationReport {
    bool pass = true;
    std::vector<std::string> failures;
    double worst_weight_residual = 0;
    double dissipativity_margin = 0;

    void fail(std::string msg) {
        pass = false;
        failures.push_back(std::move(msg));
    }

    std::string summary() const {
        if (pass) return "ok";
        std::string s;
        for (const auto& f : failures) s += (s.empty() ? "" : "; ") + f;
        return s;
    }
};

/// Pre-run validation pipeline: scalar ranges, non-characteristic condition,
/// weight-equation residuals against the scenario's own dissipation diagonal,
/// dissipativity certificate, and finite initial data.
inline ValidationReport validate_scenario(const Scenario& sc, int dissipativity_probes = 4) {
    ValidationReport rep;
    if (!(sc.t_final > 0)) rep.fail("t_final must be > 0");
    if (!(sc.cfl_factor > 0 && sc.cfl_factor <= 1)) rep.fail("cfl factor must lie in (0, 1]");
    if (!(sc.theta > 0 && sc.theta <= 1)) rep.fail("theta must lie in (0, 1]");
    if (sc.control_mode == ControlMode::SharpEquality && sc.theta != 1.0)
        rep.fail("sharp-equality mode requires theta = 1");
    if (!(sc.weights.c_l_min() > 0)) rep.fail("C_L must be > 0");
    if (sc.n != sc.coeffs.n || sc.n != sc.weights.components() ||
        sc.n != static_cast<int>(sc.initial.comp.size()))
        rep.fail("component counts disagree across scenario fields");
    if (!(sc.coeffs.grid == sc.grid) || !(sc.weights.grid == sc.grid) ||
        !(sc.initial.grid == sc.grid))
        rep.fail("scenario fields live on different grids");
    if (!rep.pass) return rep;

    try {
        require_non_characteristic(sc.coeffs);
    } catch (const Error& e) {
        rep.fail(e.what());
    }

    const double tol = sc.weight_tolerance();
    for (int i = 0; i < sc.n; ++i) {
        const auto res =
            weight_residual(sc.weights.mu[i], sc.coeffs, i, sc.dissipation.diagonal[i],
                            sc.weights.c_l[i]);
        rep.worst_weight_residual = std::max(rep.worst_weight_residual, res.max_norm);
        if (res.max_norm > tol)
            rep.fail("weight residual for component " + std::to_string(i + 1) + " is " +
                     std::to_string(res.max_norm) + " > tolerance " + std::to_string(tol));
    }

    const auto diss = check_dissipativity(sc.coeffs.coupling, sc.weights.mu,
                                          sc.dissipation.diagonal, sc.n, dissipativity_probes);
    rep.dissipativity_margin = diss.worst_margin;
    if (!diss.pass)
        rep.fail("dissipativity certificate fails: margin " + std::to_string(diss.worst_margin) +
                 " at cell " + std::to_string(diss.worst_cell));

    if (!sc.initial.finite()) rep.fail("initial state contains non-finite values");
    return rep;
}

} // namespace hypctl
