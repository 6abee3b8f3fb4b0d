#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hypctl/lyapunov.hpp"

namespace hypctl {

// Trace CSV layout: comment lines prefixed '#' (one carries the scenario
// fingerprint), then the fixed header and one row per observed step. Values
// are rendered with 17 significant digits so binary64 round-trips exactly.
inline constexpr const char* kTraceHeader = "t,L,B,I,S,u_max,rate_running";

inline std::string format_trace_csv(const LyapunovTrace& trace) {
    std::string out;
    char buf[512];
    if (!trace.fingerprint.empty()) out += "# scenario=" + trace.fingerprint + "\n";
    out += kTraceHeader;
    out += "\n";
    for (std::size_t q = 0; q < trace.samples.size(); ++q) {
        const auto& s = trace.samples[q];
        double rate = 0.0;
        if (q > 0) {
            const auto& p = trace.samples[q - 1];
            if (s.lyapunov > 0 && p.lyapunov > 0 && s.t > p.t)
                rate = -(std::log(s.lyapunov) - std::log(p.lyapunov)) / (s.t - p.t);
        }
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                      s.lyapunov, s.boundary, s.volume, s.source, s.u_max, rate);
        out += buf;
    }
    return out;
}

inline void write_trace_csv(const std::string& path, const LyapunovTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open trace file for writing: " + path);
    out << format_trace_csv(trace);
}

inline LyapunovTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path);
    LyapunovTrace trace;
    std::string line;
    bool saw_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string tag = "# scenario=";
            if (line.rfind(tag, 0) == 0) trace.fingerprint = line.substr(tag.size());
            continue;
        }
        if (!saw_header) {
            if (line != kTraceHeader)
                throw ConfigError("trace CSV line " + std::to_string(line_no) +
                                  ": unexpected header '" + line + "'");
            saw_header = true;
            continue;
        }
        TraceSample s;
        double rate = 0;
        std::istringstream row(line);
        std::string item;
        double* fields[] = {&s.t, &s.lyapunov, &s.boundary, &s.volume, &s.source, &s.u_max, &rate};
        for (double* f : fields) {
            if (!std::getline(row, item, ','))
                throw ConfigError("trace CSV line " + std::to_string(line_no) + ": short row");
            try {
                *f = std::stod(item);
            } catch (...) {
                throw ConfigError("trace CSV line " + std::to_string(line_no) +
                                  ": bad number '" + item + "'");
            }
        }
        trace.record(s);
    }
    if (!saw_header || trace.samples.empty())
        throw ConfigError("trace CSV is empty: " + path);
    return trace;
}

/// Post-run verdicts against the standing thresholds: decay-rate ratio >= 0.9,
/// Lyapunov values non-increasing between records, and the boundary term never
/// below -1e-10 (L + 1).
struct TraceVerdict {
    double rate_on_l = 0;
    double rate_ratio = 0;
    double max_boundary = 0;
    double min_boundary_margin = 0; // min over samples of B + 1e-10 (L + 1)
    double min_gronwall_margin = 0; // min over consecutive samples of L_m - L_{m+1}
    bool rate_pass = false;
    bool gronwall_pass = false;
    bool boundary_pass = false;

    bool all_pass() const { return rate_pass && gronwall_pass && boundary_pass; }
};

inline TraceVerdict analyze_trace(const LyapunovTrace& trace, double c_l) {
    if (trace.samples.size() < 2) throw ConfigError("trace has fewer than 2 samples");
    TraceVerdict v;
    const double t_end = trace.samples.back().t;
    const auto fit = fit_decay_rate(trace, 0.1 * t_end, 0.9 * t_end);
    v.rate_on_l = fit.rate_on_l;
    v.rate_ratio = c_l > 0 ? fit.rate_on_l / c_l : std::numeric_limits<double>::infinity();
    v.rate_pass = v.rate_ratio >= 0.9;

    v.min_gronwall_margin = std::numeric_limits<double>::infinity();
    for (std::size_t q = 1; q < trace.samples.size(); ++q)
        v.min_gronwall_margin = std::min(
            v.min_gronwall_margin, trace.samples[q - 1].lyapunov - trace.samples[q].lyapunov);
    v.gronwall_pass = v.min_gronwall_margin >= -1e-12 * (trace.samples.front().lyapunov + 1.0);

    v.max_boundary = -std::numeric_limits<double>::infinity();
    v.min_boundary_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : trace.samples) {
        v.max_boundary = std::max(v.max_boundary, s.boundary);
        v.min_boundary_margin =
            std::min(v.min_boundary_margin, s.boundary + 1e-10 * (s.lyapunov + 1.0));
    }
    v.boundary_pass = v.min_boundary_margin >= 0.0;
    return v;
}

} // namespace hypctl
