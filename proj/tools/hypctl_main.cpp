// Command-line front end: run / validate / report.
//
// Exit codes: 0 success, 1 usage error, 2 validation or config failure,
// 3 numerical instability, 4 control infeasibility.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "hypctl/config.hpp"
#include "hypctl/solver.hpp"
#include "hypctl/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInstability = 3;
constexpr int kExitControl = 4;

int cmd_run(const std::string& config_path) {
    const auto cfg = hypctl::load_config(config_path);
    const auto scenario = hypctl::build_scenario(cfg);
    const auto validation = hypctl::validate_scenario(scenario);
    if (!validation.pass) {
        std::fprintf(stderr, "validation failed: %s\n", validation.summary().c_str());
        return kExitValidation;
    }
    const auto result = hypctl::run(scenario, cfg.cadence);
    hypctl::write_trace_csv(cfg.trace_path, result.trace);

    const auto& first = result.trace.samples.front();
    const auto& last = result.trace.samples.back();
    std::printf("scenario  %s (fingerprint %s)\n", hypctl::to_string(cfg.kind),
                scenario.fingerprint.c_str());
    std::printf("steps     %zu  (dt per CFL %.3g)\n", result.reports.size() - 1,
                result.reports.front().dt);
    std::printf("L(0)      %.17g\n", first.lyapunov);
    std::printf("L(T)      %.17g\n", last.lyapunov);
    if (first.lyapunov > 0 && last.lyapunov > 0)
        std::printf("observed rate-on-L  %.6g  (target C_L %.6g)\n",
                    -std::log(last.lyapunov / first.lyapunov) / last.t, scenario.c_l());
    std::printf("trace     %s\n", cfg.trace_path.c_str());
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    const auto cfg = hypctl::load_config(config_path);
    const auto scenario = hypctl::build_scenario(cfg);
    const auto rep = hypctl::validate_scenario(scenario);
    std::printf("weight residual (max over components)  %.6g\n", rep.worst_weight_residual);
    std::printf("dissipativity margin                   %.6g\n", rep.dissipativity_margin);
    std::printf("validation: %s\n", rep.pass ? "pass" : rep.summary().c_str());
    return rep.pass ? kExitOk : kExitValidation;
}

int cmd_report(const std::string& csv_path, double c_l) {
    const auto trace = hypctl::read_trace_csv(csv_path);
    const auto v = hypctl::analyze_trace(trace, c_l);
    std::printf("samples              %zu\n", trace.samples.size());
    if (!trace.fingerprint.empty())
        std::printf("scenario fingerprint %s\n", trace.fingerprint.c_str());
    std::printf("fitted rate-on-L     %.6g\n", v.rate_on_l);
    std::printf("ratio to C_L         %.6g   [%s] (threshold 0.9)\n", v.rate_ratio,
                v.rate_pass ? "pass" : "FAIL");
    std::printf("max boundary term    %.6g\n", v.max_boundary);
    std::printf("boundary term bound  %.6g   [%s] (B >= -1e-10 (L+1))\n", v.min_boundary_margin,
                v.boundary_pass ? "pass" : "FAIL");
    std::printf("min Gronwall margin  %.6g   [%s] (L non-increasing)\n", v.min_gronwall_margin,
                v.gronwall_pass ? "pass" : "FAIL");
    std::printf("verdict: %s\n", v.all_pass() ? "pass" : "FAIL");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-feedback stabilization of linear hyperbolic balance laws"};
    app.require_subcommand(1);

    std::string config_path;
    std::string csv_path;
    double c_l = 1.0;

    auto* run_cmd = app.add_subcommand("run", "validate, run and write the trace CSV");
    run_cmd->add_option("config", config_path, "scenario config file")->required();

    auto* val_cmd = app.add_subcommand("validate", "run only the validation pipeline");
    val_cmd->add_option("config", config_path, "scenario config file")->required();

    auto* rep_cmd = app.add_subcommand("report", "summarize a trace CSV against thresholds");
    rep_cmd->add_option("csv", csv_path, "trace CSV produced by 'run'")->required();
    rep_cmd->add_option("--c-l", c_l, "expected decay constant C_L")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage; // --help exits 0
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config_path);
        if (val_cmd->parsed()) return cmd_validate(config_path);
        if (rep_cmd->parsed()) return cmd_report(csv_path, c_l);
        return kExitUsage;
    } catch (const hypctl::InstabilityError& e) {
        std::fprintf(stderr, "instability: %s\n", e.what());
        return kExitInstability;
    } catch (const hypctl::ControlError& e) {
        std::fprintf(stderr, "control infeasible: %s\n", e.what());
        return kExitControl;
    } catch (const hypctl::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
}
