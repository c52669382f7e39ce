#pragma once

#include <string>
#include <vector>

#include "degwave/model.hpp"

namespace degwave {

// One validation check. For plain value checks pass = |measured - target| <=
// tolerance. Trend checks (names ending in "_violation") encode the monotone
// predicate as: measured = worst signed violation, pass = measured <= target +
// tolerance.
struct CheckResult {
    std::string name;
    double target = 0.0;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ValidationReport {
    ModelParams params;
    double phi0;
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;
    bool all_pass() const;
};

// Compares the connecting orbit of the full planar system against the
// closed-form tail profile at the given xi checkpoints (negative, decreasing),
// plus the reduced-flow exactness oracle and the decay-rate slope.
ValidationReport validate_theorem2(const ModelParams& params, double phi0,
                                   const std::vector<double>& xi_checkpoints);

// Quadrature of the wave coordinate down to s = -10^6: strict decrease of
// xi(-10^k), agreement with the closed-form xi(s), and the log-rate
// xi(s)/log(-s) against its finite-s analytic value.
ValidationReport validate_step2(const ModelParams& params, double phi0);

struct ReportConfig {
    int p = 2;
    double c = 1.0;
    int delta = 1;
    double phi0 = 0.01;
    std::vector<std::string> suites = {"lambertw", "equilibria", "step2", "theorem2",
                                       "pde"};
    std::string out_dir = "report_out";
    // PDE speed check knobs
    double pde_x_min = -30.0;
    double pde_x_max = 30.0;
    int pde_nx = 1201;
    double pde_t_end = 3.0;
    double pde_safety = 0.4;
    double pde_level = 0.5;
};

// Flat INI-style config: [section] headers, key = value lines, '#'/';'
// comments. Unknown keys are rejected.
ReportConfig parse_report_config(const std::string& path);

// Executes the configured suites, writes report.json plus CSV artifacts under
// out_dir, and returns the combined report. Sub-validation errors become
// failing checks rather than propagating.
ValidationReport run_report(const ReportConfig& config);

// Byte-stable JSON: fixed key order {params, checks, artifacts, status},
// shortest-round-trip number formatting.
std::string report_to_json(const ValidationReport& report);

}  // namespace degwave
