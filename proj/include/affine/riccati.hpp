#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "affine/params.hpp"

namespace affine {

// F(u) = <b, u> + c - sum_k (e^{-<u, xi_k>} - 1) w_k.
double F_of(const AffineParams& p, const SymMat& u);

// R(u) = -2 u alpha u + B^T(u) + gamma
//        - sum_k (e^{-<u, xi_k>} - 1 + <chi(xi_k), u>) / (||xi_k||^2 ^ 1) W_k.
SymMat R_of(const AffineParams& p, const SymMat& u);

struct RiccatiOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = 0.1;  // bounds the quadratic term
    int grid = 64;          // number of output intervals
};

struct RiccatiDiagnostics {
    size_t accepted = 0;
    size_t rejected = 0;
    double min_psi_eigenvalue = 0.0;  // over the whole grid
    // Set when lambda_min(psi) keeps changing sign near zero, which for
    // boundary initial data signals that the flow is grazing the boundary.
    bool boundary_oscillation = false;
};

struct RiccatiSolution {
    std::vector<double> times;  // t_0 = 0 < ... < t_N = t_end
    std::vector<double> phi;    // phi[0] = 0
    std::vector<SymMat> psi;    // psi[0] = u0
    SymMat u0;
    RiccatiDiagnostics diagnostics;

    double phi_end() const { return phi.back(); }
    const SymMat& psi_end() const { return psi.back(); }
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg, double t) : std::runtime_error(msg), t_reached(t) {}
    double t_reached;
};

// Integrates phi and psi jointly with a Dormand-Prince 5(4) embedded pair
// and PI step-size control, stepping exactly onto the output grid. The
// continuum solution cannot leave the cone, so negativity of psi is pure
// discretization error: eigenvalues in (-atol, 0) are clamped after accepted
// steps, anything below -atol rejects the step. Throws SolverError on
// step-size underflow, reporting the time reached.
RiccatiSolution solve_riccati(const AffineParams& p, const SymMat& u0, double t_end,
                              const RiccatiOptions& opts = {});

struct WishartValue {
    double phi;
    SymMat psi;
    double laplace;
};

// Closed form for the parameter set (alpha = I, b = delta I, no linear
// drift, no jumps, no killing): phi = (delta/2) log det(I + 2tu),
// psi = (I + 2tu)^{-1} u, laplace = exp(-phi - <psi, x>).
WishartValue wishart_closed_form(double delta, const SymMat& x, const SymMat& u, double t);

struct SemiflowReport {
    double phi_defect = 0.0;
    double psi_defect = 0.0;   // Frobenius norm
    double scale = 1.0;        // 1 + ||psi(t+s, u)||
    bool pass = false;
};

// Defect of the composition law phi(t+s,u) = phi(t,u) + phi(s, psi(t,u)),
// psi(t+s,u) = psi(s, psi(t,u)); passes when both defects are at most
// tol * (1 + ||psi||).
SemiflowReport check_semiflow(const AffineParams& p, const SymMat& u0, double t, double s,
                              double tol, const RiccatiOptions& opts = {});

}  // namespace affine
