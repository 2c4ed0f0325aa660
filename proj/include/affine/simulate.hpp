#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "affine/params.hpp"

namespace affine {

enum class Scheme { euler_project, euler_regularized };

struct SimConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int n_paths = 1;
    uint64_t seed = 0;
    Scheme scheme = Scheme::euler_project;
    double eps = 1e-6;       // regularized scheme only
    double cutoff_n = 1e6;   // regularized scheme only
    std::vector<double> record_grid;  // defaults to {t_end}
    int workers = 1;         // <= 0 means hardware concurrency
};

struct JumpMark {
    double time;
    int atom_index;
    char source;  // 'm' constant measure, 'u' state-dependent kernel
};

struct PathEnsemble {
    std::vector<double> grid;
    int dim = 0;
    int n_paths = 0;
    std::vector<SymMat> states;  // n_paths x grid, path-major
    std::vector<std::vector<JumpMark>> jump_marks;
    std::vector<double> survival;  // (0, 1]; identically 1 for conservative sets
    uint64_t seed = 0;
    double clamp_mass_mean = 0.0;  // mean clamped eigenvalue mass per step

    const SymMat& state(int path, int grid_idx) const {
        return states[static_cast<size_t>(path) * grid.size() + grid_idx];
    }
    // Pairwise-summed mean state at a grid index (deterministic in the
    // worker count).
    SymMat mean_state(int grid_idx) const;
    // Monte Carlo estimate of E[survival * e^{-<u, X_t>}] with its standard
    // error.
    struct Estimate {
        double value;
        double stderr_;
    };
    Estimate laplace_estimate(int grid_idx, const SymMat& u) const;
};

// Cutoff profile: 1 for ||x|| <= n, n/||x|| for ||x|| >= n+1, C^1 blend in
// between. Applied to states to bound the coefficients of the regularized
// construction.
double phi_cutoff(double r, double n);
double phi_cutoff_radial_derivative(double r, double n);

// Directional volatility sigma^{kl}(x) = sqrt(x) M^{kl} Sigma
// + Sigma^T M^{lk} sqrt(x); Sigma^T Sigma must equal the diffusion
// coefficient.
SymMat sigma_kl(const SymMat& x, const Mat& sigma, int k, int l);

// Regularized square root s_{eps,n}(x) = sqrt(phi_n(x) x + eps I)
// - sqrt(eps I); smooth and bounded, converges to sqrt(phi_n(x) x) as
// eps -> 0.
SymMat s_eps_n(const SymMat& x, double eps, double n);

SymMat sigma_kl_reg(const SymMat& x, const Mat& sigma, double eps, double n, int k, int l);

// Closed-form Stratonovich drift (1/2) sum_kl D sigma^{kl}_{eps,n}(x)
// sigma^{kl}_{eps,n}(x), evaluated in the eigenbasis of x.
SymMat strato_correction(const SymMat& x, const Mat& sigma, double eps, double n);

struct AuditSample {
    SymMat x;
    double jump_support_slack;   // min eigenvalue of x + xi over atoms
    double sigma_normal_defect;  // worst |<sigma^{kl}, u>|
    double drift_slack;          // worst <b + B(x) - comp - strato, u>
};

struct AuditReport {
    double worst_jump_support = 0.0;
    double worst_sigma_normal = 0.0;
    double worst_drift_slack = 0.0;
    bool jump_support_pass = false;
    bool sigma_normal_pass = false;
    bool drift_pass = false;
    bool pass = false;
    std::vector<AuditSample> worst_cases;  // the worst sample per condition
    std::string to_text() const;
};

// Boundary viability audit at sampled boundary points (random rotations and
// ranks): jump support stays in the cone, the regularized volatility is
// tangential at the boundary, and the drift net of the compensator and the
// Stratonovich correction points inward. Report-only; accepts non-admissible
// sets so violations can be located.
AuditReport viability_audit(const AffineParams& p, double eps, double n,
                            int sample_boundary_points, uint64_t seed = 0);

// Euler scheme for the jump-diffusion: explicit drift net of the small-jump
// compensator, diffusion increment sqrt(x) G Sigma + Sigma^T G^T sqrt(x), at
// most one jump per step by thinning, killing as a multiplicative survival
// weight, projection onto the cone after every step. Paths are independent
// RNG streams keyed by (seed, path, step), so results do not depend on the
// worker count.
PathEnsemble simulate_paths(const AffineParams& p, const SymMat& x0, const SimConfig& cfg);

// Pairwise summation; deterministic reduction independent of chunking.
double pairwise_sum(const double* data, size_t n);

}  // namespace affine
