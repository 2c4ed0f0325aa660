#pragma once

#include <optional>
#include <string>
#include <vector>

#include "affine/laplace.hpp"
#include "affine/simulate.hpp"

namespace affine {

struct CompareEntry {
    double t = 0.0;
    SymMat u;
    double mc = 0.0;
    double mc_stderr = 0.0;
    double riccati = 0.0;
    std::optional<double> closed_form;
    double z_score = 0.0;
    bool pass = false;
};

struct ConvergenceRow {
    double dt = 0.0;
    double abs_err = 0.0;      // median over seeds of |mc - riccati|
    double bias_budget = 0.0;  // tightened proportionally to dt
    double clamp_mass = 0.0;   // mean clamped eigenvalue mass per step
};

struct CompareReport {
    std::vector<CompareEntry> entries;
    std::vector<ConvergenceRow> convergence;
    bool pass = false;
    std::string to_text() const;
};

struct CompareConfig {
    SimConfig sim;
    double bias_budget = 2e-2;           // calibrated at dt = 1e-3
    std::vector<double> convergence_dts;  // optional convergence table
    int convergence_seeds = 5;
    RiccatiOptions riccati;
};

// Detects the Wishart pattern alpha = a I, b = beta I, no linear drift, no
// jumps, no killing (deliberately conservative); returns the effective
// (a, delta = beta / a).
std::optional<std::pair<double, double>> wishart_pattern(const AffineParams& p);

// One ensemble reused across all (t, u) queries: estimates
// E[survival e^{-<u, X_t>}], compares against the Riccati value, attaches
// the closed form when the Wishart pattern matches. Pass criterion per
// entry: |mc - riccati| <= 3 stderr + bias_budget.
CompareReport compare(const AffineParams& p, const SymMat& x0, const std::vector<SymMat>& u_list,
                      const std::vector<double>& t_list, const CompareConfig& cfg);

}  // namespace affine
