// Acceptance suite: one check per release criterion, each printed as a
// single pass/fail line with the observed worst case. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "affine/laplace.hpp"
#include "affine/mc_compare.hpp"
#include "affine/sampling.hpp"
#include "affine/simulate.hpp"

using namespace affine;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d  %-34s %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random admissible set: b = (d-1) alpha + PSD margin, drift Hx + xH^T plus
// the exact jump compensator, optional finite-atom measures.
AffineParams random_admissible(CounterRng& rng, int d, bool with_jumps) {
    AffineParams p;
    p.dim = d;
    p.alpha = random_psd(rng, d);
    p.b = p.alpha * static_cast<double>(d - 1) + random_psd(rng, d, 0.5);
    p.gamma = SymMat(d);
    Mat h(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) h(i, j) = 0.5 * rng.normal();
    p.drift = LinearDrift::from_h(h);
    if (with_jumps) {
        p.m = ScalarAtomMeasure(
            {{random_psd(rng, d, 0.8) + SymMat::identity(d) * 0.05, 0.2 + rng.uniform()}});
        p.mu = MatrixAtomMeasure({{random_psd(rng, d, 1.5) + SymMat::identity(d) * 0.05,
                                   random_psd(rng, d, 0.5)}});
        const MatrixAtomMeasure mu_copy = p.mu;
        const LinearDrift comp = LinearDrift::from_linear_map(
            d, [&](const SymMat& x) { return compensator_drift_linear(mu_copy, x); });
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) p.drift.add_to_beta(i, j, comp.beta(i, j));
    }
    return p;
}

AffineParams pure_jump_params(int d) {
    AffineParams p;
    p.dim = d;
    p.alpha = SymMat(d);
    p.b = SymMat::identity(d);
    p.gamma = SymMat(d);
    p.m = ScalarAtomMeasure({{SymMat::identity(d) * 0.4, 0.7}});
    p.mu = MatrixAtomMeasure({{SymMat::identity(d) * 1.5, SymMat::identity(d) * 0.3}});
    const MatrixAtomMeasure mu_copy = p.mu;
    p.drift = LinearDrift::from_linear_map(
        d, [&](const SymMat& x) { return compensator_drift_linear(mu_copy, x); });
    return p;
}

char buf[256];

// 1. Riccati solver against the closed-form oracle over a time range.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const AffineParams p = make_wishart_params(2, 2.0);
    const SymMat u0 = SymMat::identity(2);
    RiccatiOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    double worst = 0.0;
    for (double t : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        const RiccatiSolution sol = solve_riccati(p, u0, t, opts);
        const double phi_oracle = 1.0 * std::log(1.0 + 2.0 * t) * 2.0;  // (delta/2) log det
        const SymMat psi_oracle = SymMat::identity(2) * (1.0 / (1.0 + 2.0 * t));
        worst = std::max(worst, std::abs(sol.phi_end() - phi_oracle));
        worst = std::max(worst, (sol.psi_end() - psi_oracle).frobenius_norm());
    }
    const double elapsed = seconds_since(t0);
    std::snprintf(buf, sizeof buf, "worst defect %.2e, %.2fs", worst, elapsed);
    report(1, "wishart closed-form oracle", worst <= 1e-7 && elapsed < 1.0, buf);
}

// 2. Semiflow composition on 20 random admissible sets.
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    bool pass = true;
    for (int k = 0; k < 20; ++k) {
        CounterRng rng(100 + k, 0, 0, CounterRng::kGeneric);
        const int d = 2 + k % 2;
        const AffineParams p = random_admissible(rng, d, k % 2 == 1);
        const SymMat u0 = random_psd(rng, d, 1.5);
        const SemiflowReport rep = check_semiflow(p, u0, 0.4, 0.4, 1e-7);
        worst = std::max(worst, std::max(rep.phi_defect, rep.psi_defect) / rep.scale);
        pass = pass && rep.pass;
    }
    const double elapsed = seconds_since(t0);
    std::snprintf(buf, sizeof buf, "worst scaled defect %.2e, %.2fs", worst, elapsed);
    report(2, "semiflow composition", pass && elapsed < 10.0, buf);
}

// 3. Order preservation of the flow on 100 ordered pairs.
void criterion_3() {
    double worst_psi = std::numeric_limits<double>::infinity();
    double worst_phi = std::numeric_limits<double>::infinity();
    RiccatiOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    for (int k = 0; k < 100; ++k) {
        CounterRng rng(200 + k, 0, 0, CounterRng::kGeneric);
        const int d = 2 + k % 2;
        const AffineParams p = random_admissible(rng, d, k % 3 == 0);
        const SymMat u = random_psd(rng, d, 2.0) + SymMat::identity(d) * 0.05;
        SymMat q = random_psd(rng, d, 1.0);
        const SymMat v = sandwich(sqrt_psd(u), q);  // 0 <= v <= u
        const RiccatiSolution su = solve_riccati(p, u, 1.0, opts);
        const RiccatiSolution sv = solve_riccati(p, v, 1.0, opts);
        worst_psi = std::min(worst_psi, min_eigenvalue(su.psi_end() - sv.psi_end()));
        worst_phi = std::min(worst_phi, su.phi_end() - sv.phi_end());
    }
    std::snprintf(buf, sizeof buf, "min eig %.2e, min phi gap %.2e", worst_psi, worst_phi);
    report(3, "order preservation", worst_psi >= -1e-8 && worst_phi >= -1e-10, buf);
}

// 4. Interior invariance for positive definite initial data.
void criterion_4() {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 50; ++k) {
        CounterRng rng(300 + k, 0, 0, CounterRng::kGeneric);
        const int d = 2 + k % 2;
        const AffineParams p = random_admissible(rng, d, k % 2 == 0);
        const SymMat u0 = random_psd(rng, d, 2.0) + SymMat::identity(d) * 0.05;
        const RiccatiSolution sol = solve_riccati(p, u0, 3.0);
        worst = std::min(worst, sol.diagnostics.min_psi_eigenvalue);
    }
    std::snprintf(buf, sizeof buf, "min grid eigenvalue %.2e", worst);
    report(4, "interior invariance", worst > 0.0, buf);
}

// 5. Constant-drift gate at the exact threshold.
void criterion_5() {
    bool pass = true;
    std::string detail;
    for (int d : {2, 3, 5}) {
        AffineParams reject = make_diffusion_params(
            SymMat::identity(d), SymMat::identity(d) * (0.99 * (d - 1)), LinearDrift::zero(d));
        AffineParams accept = make_diffusion_params(
            SymMat::identity(d), SymMat::identity(d) * (1.0 * (d - 1)), LinearDrift::zero(d));
        const bool r = !validate_admissible(reject, 8, d).pass;
        const bool a = validate_admissible(accept, 8, d).pass;
        pass = pass && r && a;
        detail += "d=" + std::to_string(d) + (r && a ? " ok " : " BAD ");
    }
    report(5, "drift-condition gate", pass, detail);
}

// 6. Determinant derivative closed forms against finite differences.
void criterion_6() {
    double worst = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < 20; ++k) {
        CounterRng rng(400 + k, 0, 0, CounterRng::kGeneric);
        const int d = 2 + k % 3;
        std::vector<double> diag(d);
        for (double& v : diag) v = 0.5 + 2.0 * rng.uniform();
        const SymMat y = SymMat::diag(diag);
        const SymMat grad = det_gradient(y);
        for (int i = 0; i < d; ++i) {
            Mat up = y.to_mat(), dn = y.to_mat();
            up(i, i) += h;
            dn(i, i) -= h;
            const double fd = (determinant(up) - determinant(dn)) / (2.0 * h);
            worst = std::max(worst, std::abs(grad(i, i) - fd) / std::max(std::abs(fd), 1e-12));
        }
        // det is multilinear: the mixed-pair stencil is exact for any step,
        // so a wider one sidesteps the 1/h^2 roundoff amplification.
        const double h2 = 1e-2;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (i == j) continue;
                Mat pp = y.to_mat(), pm = y.to_mat(), mp = y.to_mat(), mm = y.to_mat();
                pp(i, j) += h2;
                pp(j, i) += h2;
                pm(i, j) += h2;
                pm(j, i) -= h2;
                mp(i, j) -= h2;
                mp(j, i) += h2;
                mm(i, j) -= h2;
                mm(j, i) -= h2;
                const double fd = (determinant(pp) - determinant(pm) - determinant(mp) +
                                   determinant(mm)) /
                                  (4.0 * h2 * h2);
                const double cf = det_second_pair(y, i, j);
                worst = std::max(worst, std::abs(cf - fd) / std::max(std::abs(cf), 1e-6));
            }
    }
    std::snprintf(buf, sizeof buf, "worst relative error %.2e", worst);
    report(6, "determinant derivatives", worst <= 1e-6, buf);
}

// 7. The directional volatilities factor the diffusion symbol.
void criterion_7() {
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        CounterRng rng(500 + rep, 0, 0, CounterRng::kGeneric);
        const int d = 2 + rep % 2;
        const SymMat alpha = random_psd(rng, d);
        const Mat sigma = sqrt_psd(alpha).to_mat();
        const SymMat x = random_psd(rng, d, 2.0);
        std::vector<SymMat> sig;
        for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) sig.push_back(sigma_kl(x, sigma, k, l));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l) {
                        double sum = 0.0;
                        for (const SymMat& s : sig) sum += s(i, j) * s(k, l);
                        worst = std::max(worst,
                                         std::abs(sum - diffusion_symbol(x, alpha, i, j, k, l)));
                    }
    }
    std::snprintf(buf, sizeof buf, "worst defect %.2e", worst);
    report(7, "volatility factorization", worst <= 1e-10, buf);
}

// 8. Boundary drift audit: equality case passes, shrunk drift violates.
void criterion_8() {
    double worst_pass = std::numeric_limits<double>::infinity();
    double worst_violation = std::numeric_limits<double>::infinity();
    for (int d : {2, 3}) {
        CounterRng arng(600 + d, 0, 0, CounterRng::kGeneric);
        const SymMat alpha = random_psd(arng, d) + SymMat::identity(d) * 0.3;
        const Mat sigma = sqrt_psd(alpha).to_mat();
        const SymMat b_exact = alpha * static_cast<double>(d - 1);
        const SymMat b_short = alpha * (0.9 * (d - 1));
        for (int s = 0; s < 200; ++s) {
            CounterRng rng(700 + d, 0, static_cast<uint64_t>(s), CounterRng::kGeneric);
            const int rank = 1 + static_cast<int>(rng.uniform() * (d - 1));
            const SymMat x = random_boundary_point(rng, d, std::min(rank, d - 1));
            const SymMat corr = strato_correction(x, sigma, 1e-6, 1e6);
            for (const SymMat& u : normal_cone_basis(x)) {
                worst_pass = std::min(worst_pass, inner(b_exact - corr, u));
                worst_violation = std::min(worst_violation, inner(b_short - corr, u));
            }
        }
    }
    std::snprintf(buf, sizeof buf, "equality slack %.2e, shrunk slack %.2e", worst_pass,
                  worst_violation);
    report(8, "boundary drift audit", worst_pass >= -1e-9 && worst_violation < -1e-9, buf);
}

// 9. Monte Carlo against the Riccati oracle on the wishart set.
void criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    const AffineParams p = make_wishart_params(2, 2.0);
    CompareConfig cfg;
    cfg.sim.dt = 1e-3;
    cfg.sim.t_end = 0.5;
    cfg.sim.n_paths = 50000;
    cfg.sim.seed = 2024;
    cfg.sim.workers = 0;
    cfg.bias_budget = 2e-2;
    const std::vector<SymMat> u_list{SymMat::identity(2), SymMat::identity(2) * 0.5,
                                     SymMat::diag({1.0, 0.0})};
    const CompareReport rep = compare(p, SymMat::identity(2), u_list, {0.5}, cfg);
    const double elapsed = seconds_since(t0);
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (const CompareEntry& e : rep.entries)
        worst_gap = std::max(worst_gap,
                             std::abs(e.mc - e.riccati) - 3.0 * e.mc_stderr);
    std::snprintf(buf, sizeof buf, "worst |mc-ric|-3se %.2e (budget 2e-2), %.1fs", worst_gap,
                  elapsed);
    report(9, "monte carlo vs riccati (wishart)", rep.pass && elapsed < 120.0, buf);
}

// 10. Pure-jump pipeline plus per-atom jump count compensation.
void criterion_10() {
    const AffineParams p = pure_jump_params(2);
    CompareConfig cfg;
    cfg.sim.dt = 1e-3;
    cfg.sim.t_end = 0.5;
    cfg.sim.n_paths = 50000;
    cfg.sim.seed = 2025;
    cfg.sim.workers = 0;
    cfg.bias_budget = 2e-2;
    const std::vector<SymMat> u_list{SymMat::identity(2), SymMat::identity(2) * 0.5};
    const CompareReport rep = compare(p, SymMat::identity(2), u_list, {0.5}, cfg);

    // empirical jump counts vs the time-integrated intensities
    SimConfig sim = cfg.sim;
    sim.n_paths = 5000;
    sim.record_grid.clear();
    const int coarse = 50;
    for (int k = 0; k <= coarse; ++k) sim.record_grid.push_back(k * 0.01);
    const PathEnsemble ens = simulate_paths(p, SymMat::identity(2), sim);
    double worst_z = 0.0;
    for (int atom = 0; atom < 2; ++atom) {
        const char source = atom == 0 ? 'm' : 'u';
        std::vector<double> comp(sim.n_paths);
        for (int path = 0; path < sim.n_paths; ++path) {
            double lam = 0.0;
            for (int k = 0; k < coarse; ++k) {
                const SymMat& x = ens.state(path, k);
                lam += (source == 'm' ? p.m.atoms()[0].weight : kernel_intensity(p.mu, x)[0]) *
                       0.01;
            }
            double count = 0.0;
            for (const JumpMark& mark : ens.jump_marks[path])
                if (mark.source == source) count += 1.0;
            comp[path] = count - lam;
        }
        const double mean = pairwise_sum(comp.data(), comp.size()) / sim.n_paths;
        double var = 0.0;
        for (double v : comp) var += (v - mean) * (v - mean);
        var /= (sim.n_paths - 1);
        const double se = std::sqrt(var / sim.n_paths);
        worst_z = std::max(worst_z, std::abs(mean) / std::max(se, 1e-12));
    }
    std::snprintf(buf, sizeof buf, "laplace %s, worst jump-count z %.2f",
                  rep.pass ? "ok" : "FAIL", worst_z);
    report(10, "pure-jump pipeline", rep.pass && worst_z <= 3.0, buf);
}

// 11. Linear transformation consistency through the Riccati flow.
void criterion_11() {
    double worst = 0.0;
    RiccatiOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    for (int k = 0; k < 10; ++k) {
        CounterRng rng(800 + k, 0, 0, CounterRng::kGeneric);
        const int d = 2 + k % 2;
        const AffineParams p = random_admissible(rng, d, false);
        Mat g(d);
        do {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) g(i, j) = rng.normal() + (i == j ? 1.0 : 0.0);
        } while (std::abs(determinant(g)) < 0.1);
        const AffineParams q = transform(p, g);
        const SymMat u = random_psd(rng, d);
        const double t = 0.8;
        const RiccatiSolution tilde = solve_riccati(q, u, t, opts);
        const RiccatiSolution base = solve_riccati(p, congruence(g.transpose(), u), t, opts);
        worst = std::max(worst, std::abs(tilde.phi_end() - base.phi_end()));
        const SymMat mapped = congruence(inverse(g.transpose()), base.psi_end());
        worst = std::max(worst, (tilde.psi_end() - mapped).frobenius_norm());
    }
    std::snprintf(buf, sizeof buf, "worst defect %.2e", worst);
    report(11, "transformation consistency", worst <= 1e-6, buf);
}

// 12. Canonical representation of random PSD pairs.
void criterion_12() {
    double worst_alpha = 0.0, worst_offdiag = 0.0;
    bool revalidates = true;
    for (int k = 0; k < 20; ++k) {
        CounterRng rng(900 + k, 0, 0, CounterRng::kGeneric);
        const int d = 2 + k % 3;
        const SymMat alpha = k % 4 == 0 ? random_boundary_point(rng, d, d - 1)
                                        : random_psd(rng, d, 2.0) + SymMat::identity(d) * 0.1;
        const SymMat b = alpha * static_cast<double>(d - 1) + random_psd(rng, d, 0.5);
        const AffineParams p = make_diffusion_params(alpha, b, LinearDrift::zero(d));
        const CanonicalResult res = canonicalize(p);
        int r = 0;
        for (int i = 0; i < d; ++i)
            if (res.params.alpha(i, i) > 0.5) ++r;
        SymMat ird(d);
        for (int i = 0; i < r; ++i) ird.set(i, i, 1.0);
        const AffineParams direct = transform(p, res.g);
        worst_alpha = std::max(worst_alpha, (direct.alpha - ird).frobenius_norm());
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                worst_offdiag = std::max(worst_offdiag, std::abs(direct.b(i, j)));
        revalidates = revalidates && validate_admissible(direct, 16, k).pass;
    }
    std::snprintf(buf, sizeof buf, "alpha defect %.2e, offdiag %.2e, revalidate %s", worst_alpha,
                  worst_offdiag, revalidates ? "ok" : "FAIL");
    report(12, "canonical representation", worst_alpha <= 1e-8 && worst_offdiag <= 1e-8 &&
                                               revalidates,
           buf);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0)
        std::printf("all acceptance criteria pass\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures;
}
