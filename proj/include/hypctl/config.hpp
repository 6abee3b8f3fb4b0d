#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hypctl/hamjac.hpp"
#include "hypctl/scenario.hpp"

namespace hypctl {

enum class ScenarioKind { ConstantGradient, Separable, PotentialFlow, CustomCoefficients };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::ConstantGradient: return "constant-gradient";
        case ScenarioKind::Separable: return "separable";
        case ScenarioKind::PotentialFlow: return "potential-flow";
        case ScenarioKind::CustomCoefficients: return "custom-coefficients";
    }
    return "?";
}

/// Parsed, validated run description. See README for the config grammar:
/// [section] headers (scenario, grid, control, solver, output), `key = value`
/// lines, `#` comments; unknown sections or keys are errors.
struct RunConfig {
    ScenarioKind kind = ScenarioKind::ConstantGradient;
    double c_l = 1.0;
    // kind-specific
    std::vector<double> const_velocity;            // constant-gradient: c = ...
    std::vector<std::vector<double>> h_poly;       // separable: h1 = c0,c1,... per axis
    std::string phi;                               // potential-flow: bilinear | quadratic | linear:...
    std::vector<std::vector<double>> custom_a;     // custom-coefficients: a1 = ..., a2 = ...
    std::vector<double> custom_b;                  // custom-coefficients: b = r11,r12;r21,r22
    std::string dissipation_mode = "diagonal-B";   // custom-coefficients only
    std::string initial = "bump";                  // bump | constant:<v> | modes:<seed>
    // grid
    std::vector<double> lower, upper;
    std::vector<int> cells;
    // control
    std::string control_mode; // empty: kind default
    double theta = -1.0;      // negative: mode default (1 sharp, 0.9 otherwise)
    std::string control_faces = "all";
    // solver
    double t_final = 1.0;
    double cfl = 0.5;
    double weight_tol = 0.0;
    // output
    std::string trace_path = "trace.csv";
    int cadence = 10;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.begin();
    while (b != s.end() && std::isspace(static_cast<unsigned char>(*b))) ++b;
    auto e = s.end();
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
    return std::string(b, e);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

inline double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects a number, got '" + v + "'");
    }
}

inline int parse_int(const std::string& v, const std::string& key, int line) {
    const double d = parse_double(v, key, line);
    const int i = static_cast<int>(d);
    if (d != i)
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects an integer");
    return i;
}

inline std::vector<double> parse_vector(const std::string& v, const std::string& key, int line) {
    std::vector<double> out;
    for (const auto& item : split(v, ',')) out.push_back(parse_double(item, key, line));
    return out;
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool saw_kind = false, saw_grid = false;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (const auto hash = s.find('#'); hash != std::string::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section != "scenario" && section != "grid" && section != "control" &&
                section != "solver" && section != "output")
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                              "' appears before any [section]");
        const std::string qual = section + "." + key;

        if (section == "scenario") {
            if (key == "kind") {
                saw_kind = true;
                if (value == "constant-gradient") cfg.kind = ScenarioKind::ConstantGradient;
                else if (value == "separable") cfg.kind = ScenarioKind::Separable;
                else if (value == "potential-flow") cfg.kind = ScenarioKind::PotentialFlow;
                else if (value == "custom-coefficients") cfg.kind = ScenarioKind::CustomCoefficients;
                else
                    throw ConfigError("line " + std::to_string(line) +
                                      ": unknown scenario kind '" + value + "'");
            } else if (key == "c_l") {
                cfg.c_l = detail::parse_double(value, qual, line);
            } else if (key == "c") {
                cfg.const_velocity = detail::parse_vector(value, qual, line);
            } else if (key.size() == 2 && key[0] == 'h' && std::isdigit((unsigned char)key[1])) {
                const int axis = key[1] - '0';
                if (axis < 1 || axis > 9)
                    throw ConfigError("line " + std::to_string(line) + ": bad axis in '" + key + "'");
                if (static_cast<int>(cfg.h_poly.size()) < axis) cfg.h_poly.resize(axis);
                cfg.h_poly[axis - 1] = detail::parse_vector(value, qual, line);
            } else if (key == "phi") {
                cfg.phi = value;
            } else if (key.size() == 2 && key[0] == 'a' && std::isdigit((unsigned char)key[1])) {
                const int comp = key[1] - '0';
                if (comp < 1 || comp > 9)
                    throw ConfigError("line " + std::to_string(line) + ": bad component in '" +
                                      key + "'");
                if (static_cast<int>(cfg.custom_a.size()) < comp) cfg.custom_a.resize(comp);
                cfg.custom_a[comp - 1] = detail::parse_vector(value, qual, line);
            } else if (key == "b") {
                cfg.custom_b.clear();
                for (const auto& row : detail::split(value, ';'))
                    for (double v : detail::parse_vector(row, qual, line))
                        cfg.custom_b.push_back(v);
            } else if (key == "d_mode") {
                cfg.dissipation_mode = value;
            } else if (key == "initial") {
                cfg.initial = value;
            } else {
                throw ConfigError("line " + std::to_string(line) + ": unknown key '" + qual + "'");
            }
        } else if (section == "grid") {
            if (key == "lower") cfg.lower = detail::parse_vector(value, qual, line);
            else if (key == "upper") cfg.upper = detail::parse_vector(value, qual, line);
            else if (key == "cells") {
                cfg.cells.clear();
                for (const auto& item : detail::split(value, ','))
                    cfg.cells.push_back(detail::parse_int(item, qual, line));
                saw_grid = true;
            } else
                throw ConfigError("line " + std::to_string(line) + ": unknown key '" + qual + "'");
        } else if (section == "control") {
            if (key == "mode") {
                if (value != "sharp-equality" && value != "single-scalar" &&
                    value != "per-component" && value != "per-face")
                    throw ConfigError("line " + std::to_string(line) +
                                      ": unknown control mode '" + value + "'");
                cfg.control_mode = value;
            } else if (key == "theta") {
                cfg.theta = detail::parse_double(value, qual, line);
            } else if (key == "faces") {
                cfg.control_faces = value;
            } else
                throw ConfigError("line " + std::to_string(line) + ": unknown key '" + qual + "'");
        } else if (section == "solver") {
            if (key == "t_final") cfg.t_final = detail::parse_double(value, qual, line);
            else if (key == "cfl") cfg.cfl = detail::parse_double(value, qual, line);
            else if (key == "weight_tol") cfg.weight_tol = detail::parse_double(value, qual, line);
            else
                throw ConfigError("line " + std::to_string(line) + ": unknown key '" + qual + "'");
        } else if (section == "output") {
            if (key == "trace") cfg.trace_path = value;
            else if (key == "cadence") cfg.cadence = detail::parse_int(value, qual, line);
            else
                throw ConfigError("line " + std::to_string(line) + ": unknown key '" + qual + "'");
        }
    }
    if (!saw_kind) throw ConfigError("config is missing scenario.kind");
    if (!saw_grid || cfg.lower.empty() || cfg.upper.empty())
        throw ConfigError("config is missing the [grid] section (lower/upper/cells)");

    // Range validation.
    if (!(cfg.c_l > 0)) throw ConfigError("scenario.c_l: C_L must be > 0");
    if (cfg.lower.size() != cfg.upper.size() || cfg.lower.size() != cfg.cells.size())
        throw ConfigError("grid: lower/upper/cells must have equal lengths");
    for (std::size_t k = 0; k < cfg.lower.size(); ++k) {
        if (!(cfg.upper[k] > cfg.lower[k]))
            throw ConfigError("grid: upper must exceed lower on axis " + std::to_string(k + 1));
        if (cfg.cells[k] < 2)
            throw ConfigError("grid.cells: need at least 2 cells per axis");
    }
    if (!(cfg.t_final > 0)) throw ConfigError("solver.t_final must be > 0");
    if (!(cfg.cfl > 0 && cfg.cfl <= 1)) throw ConfigError("solver.cfl must lie in (0, 1]");
    if (cfg.theta >= 0 && !(cfg.theta > 0 && cfg.theta <= 1))
        throw ConfigError("control.theta must lie in (0, 1]");
    if (cfg.cadence < 1) throw ConfigError("output.cadence must be >= 1");
    if (cfg.weight_tol < 0) throw ConfigError("solver.weight_tol must be >= 0");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace detail {

inline std::string render_vector(const std::vector<double>& v) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t q = 0; q < v.size(); ++q) out << (q ? "," : "") << v[q];
    return out.str();
}

} // namespace detail

/// Canonical text form; parse_config(render_config(cfg)) == cfg.
inline std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[scenario]\n";
    out << "kind = " << to_string(cfg.kind) << "\n";
    out << "c_l = " << cfg.c_l << "\n";
    if (!cfg.const_velocity.empty()) out << "c = " << detail::render_vector(cfg.const_velocity) << "\n";
    for (std::size_t k = 0; k < cfg.h_poly.size(); ++k)
        if (!cfg.h_poly[k].empty())
            out << "h" << (k + 1) << " = " << detail::render_vector(cfg.h_poly[k]) << "\n";
    if (!cfg.phi.empty()) out << "phi = " << cfg.phi << "\n";
    for (std::size_t i = 0; i < cfg.custom_a.size(); ++i)
        if (!cfg.custom_a[i].empty())
            out << "a" << (i + 1) << " = " << detail::render_vector(cfg.custom_a[i]) << "\n";
    if (!cfg.custom_b.empty()) {
        const std::size_t n = cfg.custom_a.size();
        out << "b = ";
        for (std::size_t i = 0; i < n; ++i) {
            if (i) out << ";";
            for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << cfg.custom_b[i * n + j];
        }
        out << "\n";
    }
    if (cfg.kind == ScenarioKind::CustomCoefficients)
        out << "d_mode = " << cfg.dissipation_mode << "\n";
    out << "initial = " << cfg.initial << "\n";
    out << "[grid]\n";
    out << "lower = " << detail::render_vector(cfg.lower) << "\n";
    out << "upper = " << detail::render_vector(cfg.upper) << "\n";
    out << "cells = ";
    for (std::size_t k = 0; k < cfg.cells.size(); ++k) out << (k ? "," : "") << cfg.cells[k];
    out << "\n[control]\n";
    if (!cfg.control_mode.empty()) out << "mode = " << cfg.control_mode << "\n";
    if (cfg.theta >= 0) out << "theta = " << cfg.theta << "\n";
    out << "faces = " << cfg.control_faces << "\n";
    out << "[solver]\n";
    out << "t_final = " << cfg.t_final << "\n";
    out << "cfl = " << cfg.cfl << "\n";
    if (cfg.weight_tol > 0) out << "weight_tol = " << cfg.weight_tol << "\n";
    out << "[output]\n";
    out << "trace = " << cfg.trace_path << "\n";
    out << "cadence = " << cfg.cadence << "\n";
    return out.str();
}

/// FNV-1a 64-bit over the canonical rendering; embedded in trace CSVs.
inline std::uint64_t config_fingerprint(const RunConfig& cfg) {
    const std::string s = render_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string fingerprint_hex(const RunConfig& cfg) {
    std::ostringstream out;
    out << std::hex << config_fingerprint(cfg);
    return out.str();
}

namespace detail {

inline InitialData make_initial_data(const RunConfig& cfg, const StructuredGrid& grid) {
    const auto spec = split(cfg.initial, ':');
    const std::string form = spec[0];
    if (form == "bump") {
        // Smooth product bump vanishing on the whole boundary.
        std::vector<double> lo = grid.lower, hi = grid.upper;
        return [lo, hi](int comp, std::span<const double> x) {
            double v = 1.0 + 0.1 * comp;
            for (std::size_t k = 0; k < lo.size(); ++k) {
                const double xi = (x[k] - lo[k]) / (hi[k] - lo[k]);
                const double s = std::sin(M_PI * xi);
                v *= s * s;
            }
            return v;
        };
    }
    if (form == "constant") {
        if (spec.size() != 2) throw ConfigError("initial 'constant' needs a value: constant:<v>");
        const double v = parse_double(spec[1], "scenario.initial", 0);
        return [v](int, std::span<const double>) { return v; };
    }
    if (form == "modes") {
        if (spec.size() != 2) throw ConfigError("initial 'modes' needs a seed: modes:<seed>");
        const unsigned seed = static_cast<unsigned>(parse_int(spec[1], "scenario.initial", 0));
        // Random low-frequency sine modes, boundary-vanishing per axis.
        const int d = grid.dim;
        const int combos = 1 << d;
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<std::vector<double>> amp(16, std::vector<double>(combos));
        for (auto& row : amp)
            for (double& v : row) v = uni(rng);
        std::vector<double> lo = grid.lower, hi = grid.upper;
        return [amp, lo, hi, d, combos](int comp, std::span<const double> x) {
            double v = 0;
            for (int m = 0; m < combos; ++m) {
                double term = amp[comp % 16][m];
                for (int k = 0; k < d; ++k) {
                    const double xi = (x[k] - lo[k]) / (hi[k] - lo[k]);
                    const int p = ((m >> k) & 1) ? 2 : 1;
                    term *= std::sin(p * M_PI * xi);
                }
                v += term;
            }
            return v;
        };
    }
    throw ConfigError("unknown initial data form '" + cfg.initial + "'");
}

inline std::vector<FaceSelection> make_face_selection(const RunConfig& cfg,
                                                      const StructuredGrid& grid, int n) {
    if (cfg.control_faces == "all") return {};
    if (cfg.control_faces == "none") // every inflow face gets homogeneous data
        return std::vector<FaceSelection>(n, FaceSelection(std::vector<std::size_t>{}));
    // Side selectors "x<axis><+|->", e.g. x0-,x1+ (axes are 0-based).
    const auto faces = boundary_faces(grid);
    std::vector<std::size_t> selected;
    for (const auto& tok : split(cfg.control_faces, ',')) {
        if (tok.size() != 3 || tok[0] != 'x' || !std::isdigit((unsigned char)tok[1]) ||
            (tok[2] != '+' && tok[2] != '-'))
            throw ConfigError("control.faces: bad side selector '" + tok +
                              "' (expected e.g. x0- or x1+)");
        const int axis = tok[1] - '0';
        if (axis >= grid.dim) throw ConfigError("control.faces: axis out of range in '" + tok + "'");
        const int side = tok[2] == '+' ? 1 : 0;
        for (std::size_t f = 0; f < faces.size(); ++f)
            if (faces[f].axis == axis && faces[f].side == side) selected.push_back(f);
    }
    return std::vector<FaceSelection>(n, FaceSelection(selected));
}

inline std::optional<ControlMode> parse_control_mode(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "sharp-equality") return ControlMode::SharpEquality;
    if (s == "single-scalar") return ControlMode::SingleScalar;
    if (s == "per-component") return ControlMode::PerComponent;
    if (s == "per-face") return ControlMode::PerFace;
    throw ConfigError("unknown control mode '" + s + "'");
}

} // namespace detail

/// Instantiates the scenario a config describes (grid, coefficients, weights,
/// dissipation, partition, initial data).
inline Scenario build_scenario(const RunConfig& cfg) {
    const auto grid = build_grid(cfg.lower, cfg.upper, cfg.cells);
    const int d = grid.dim;

    ScenarioOptions opts;
    opts.mode = detail::parse_control_mode(cfg.control_mode);
    if (cfg.theta >= 0) opts.theta = cfg.theta;
    opts.t_final = cfg.t_final;
    opts.cfl_factor = cfg.cfl;
    opts.weight_tol = cfg.weight_tol;
    opts.fingerprint = fingerprint_hex(cfg);
    const auto initial = detail::make_initial_data(cfg, grid);
    opts.control_faces = detail::make_face_selection(cfg, grid, d);

    switch (cfg.kind) {
        case ScenarioKind::ConstantGradient: {
            if (static_cast<int>(cfg.const_velocity.size()) != d)
                throw ConfigError("constant-gradient: 'c' must list one velocity per axis");
            return scenario_constant_gradient(cfg.const_velocity, grid, cfg.c_l, nullptr,
                                              initial, opts);
        }
        case ScenarioKind::Separable: {
            if (static_cast<int>(cfg.h_poly.size()) != d)
                throw ConfigError("separable: need h1..h" + std::to_string(d) +
                                  " polynomial coefficients");
            std::vector<AxisFunction> h;
            for (const auto& coeffs : cfg.h_poly) {
                if (coeffs.empty()) throw ConfigError("separable: empty polynomial");
                h.push_back(axis_polynomial(coeffs));
            }
            return scenario_separable(h, grid, cfg.c_l, initial, opts);
        }
        case ScenarioKind::PotentialFlow: {
            const auto spec = detail::split(cfg.phi, ':');
            PotentialSpec phi;
            const double c_l = cfg.c_l;
            if (spec[0] == "bilinear") {
                if (d != 2) throw ConfigError("phi = bilinear needs a 2-D grid");
                phi.gradient = [](std::span<const double> x, int k) { return x[1 - k]; };
                phi.hessian = [](std::span<const double>, int i, int k) {
                    return i == k ? 0.0 : 1.0;
                };
                // D = 2 Id; a smooth exact weight is -(C_L + 2) ln(x_1 + x_2),
                // anchored on the inflow boundary.
                opts.weight_anchor = [c_l](std::span<const double> x) {
                    return -(c_l + 2.0) * std::log(x[0] + x[1]);
                };
            } else if (spec[0] == "quadratic") {
                phi.gradient = [](std::span<const double> x, int k) { return x[k]; };
                phi.hessian = [](std::span<const double>, int i, int k) {
                    return i == k ? 1.0 : 0.0;
                };
                // div a = d, D = -2: anchor -(C_L + d - 2) ln|x|.
                const double rate = c_l + d - 2.0;
                opts.weight_anchor = [rate](std::span<const double> x) {
                    double r2 = 0;
                    for (double v : x) r2 += v * v;
                    return -0.5 * rate * std::log(r2);
                };
            } else if (spec[0] == "linear") {
                if (spec.size() != 2) throw ConfigError("phi = linear:<c1,c2,...>");
                const auto c = detail::parse_vector(spec[1], "scenario.phi", 0);
                if (static_cast<int>(c.size()) != d)
                    throw ConfigError("phi = linear: one coefficient per axis");
                phi.gradient = [c](std::span<const double>, int k) { return c[k]; };
                phi.hessian = [](std::span<const double>, int, int) { return 0.0; };
                // Constant velocity: the closed-form weight restricted to the inflow.
                int j = 0;
                for (int k = 1; k < d; ++k)
                    if (std::abs(c[k]) > std::abs(c[j])) j = k;
                if (std::abs(c[j]) <= 1e-12) throw ConfigError("phi = linear: gradient vanishes");
                const double slope = c_l / c[j];
                opts.weight_anchor = [slope, j](std::span<const double> x) {
                    return -slope * x[j];
                };
            } else {
                throw ConfigError("unknown potential form '" + cfg.phi +
                                  "' (bilinear | quadratic | linear:...)");
            }
            return scenario_potential_flow(phi, grid, c_l, initial, opts);
        }
        case ScenarioKind::CustomCoefficients: {
            const int n = static_cast<int>(cfg.custom_a.size());
            if (n == 0) throw ConfigError("custom-coefficients: need a1 (and a2, ...)");
            for (const auto& a : cfg.custom_a)
                if (static_cast<int>(a.size()) != d)
                    throw ConfigError("custom-coefficients: each a_i needs one entry per axis");
            std::vector<double> b = cfg.custom_b;
            if (b.empty()) b.assign(static_cast<std::size_t>(n) * n, 0.0);
            if (static_cast<int>(b.size()) != n * n)
                throw ConfigError("custom-coefficients: b must be an n x n matrix");
            auto coeffs = make_constant_coefficients(grid, cfg.custom_a, b);
            require_non_characteristic(coeffs);

            DissipationMode mode;
            if (cfg.dissipation_mode == "diagonal-B") mode = DissipationMode::DiagonalB;
            else if (cfg.dissipation_mode == "symmetric-eig") mode = DissipationMode::SymmetricEig;
            else if (cfg.dissipation_mode == "positive-definite")
                mode = DissipationMode::PositiveDefinite;
            else if (cfg.dissipation_mode == "general-Q") mode = DissipationMode::GeneralQ;
            else
                throw ConfigError("unknown d_mode '" + cfg.dissipation_mode + "'");

            // D first (flat weights for the general-Q estimate), then the
            // weights, then the certificate against the actual weights: done
            // in validate_scenario and build_dissipation below.
            std::vector<ScalarField> d_diag;
            if (mode == DissipationMode::GeneralQ) {
                const std::vector<ScalarField> mu0(n, ScalarField(grid, 0.0));
                d_diag = build_dissipation(coeffs.coupling, mu0, n, mode).diagonal;
            } else {
                d_diag = dissipation_diagonal(coeffs.coupling, n, mode, grid);
            }

            std::vector<WeightComponent> wcomps;
            for (int i = 0; i < n; ++i)
                wcomps.push_back(solve_weight_characteristics(coeffs, i, d_diag[i], cfg.c_l,
                                                              nullptr, opts.characteristics));
            Scenario sc;
            sc.grid = grid;
            sc.n = n;
            sc.coeffs = std::move(coeffs);
            sc.weights = assemble_weights(std::move(wcomps));
            sc.dissipation.mode = mode;
            sc.dissipation.diagonal = std::move(d_diag);
            sc.dissipation.certificate = dissipation_certificate(
                sc.coeffs.coupling, sc.weights.mu, sc.dissipation.diagonal, n);
            for (double v : sc.dissipation.certificate.values)
                if (v < -1e-10)
                    throw ValidationError(
                        "custom-coefficients: dissipativity certificate fails with the "
                        "computed weights (margin " + std::to_string(v) + ")");
            sc.partition = partition_boundary(sc.coeffs, sc.weights, opts.control_faces);
            sc.initial = sample_state(grid, n, initial);
            sc.control_mode = opts.mode.value_or(ControlMode::SingleScalar);
            sc.theta = sc.control_mode == ControlMode::SharpEquality ? 1.0
                                                                     : opts.theta.value_or(0.9);
            sc.t_final = cfg.t_final;
            sc.cfl_factor = cfg.cfl;
            sc.weight_tol = cfg.weight_tol;
            sc.fingerprint = opts.fingerprint;
            return sc;
        }
    }
    throw ConfigError("unreachable scenario kind");
}

} // namespace hypctl
