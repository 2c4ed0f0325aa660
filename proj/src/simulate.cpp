#include "affine/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "affine/rng.hpp"
#include "affine/sampling.hpp"

namespace affine {

double pairwise_sum(const double* data, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

SymMat PathEnsemble::mean_state(int grid_idx) const {
    SymMat out(dim);
    const size_t g = grid.size();
    std::vector<double> vals(n_paths);
    for (size_t c = 0; c < out.packed_size(); ++c) {
        for (int p = 0; p < n_paths; ++p) vals[p] = states[p * g + grid_idx].packed()[c];
        out.packed()[c] = pairwise_sum(vals.data(), vals.size()) / n_paths;
    }
    return out;
}

PathEnsemble::Estimate PathEnsemble::laplace_estimate(int grid_idx, const SymMat& u) const {
    const size_t g = grid.size();
    std::vector<double> vals(n_paths);
    for (int p = 0; p < n_paths; ++p)
        vals[p] = survival[p] * std::exp(-inner(u, states[p * g + grid_idx]));
    const double mean = pairwise_sum(vals.data(), vals.size()) / n_paths;
    std::vector<double> sq(n_paths);
    for (int p = 0; p < n_paths; ++p) sq[p] = (vals[p] - mean) * (vals[p] - mean);
    const double var = n_paths > 1 ? pairwise_sum(sq.data(), sq.size()) / (n_paths - 1) : 0.0;
    return {mean, std::sqrt(var / n_paths)};
}

double phi_cutoff(double r, double n) {
    if (r <= n) return 1.0;
    if (r >= n + 1.0) return n / r;
    // Cubic Hermite blend matching value and slope at both ends.
    const double s = r - n;
    const double v1 = n / (n + 1.0);
    const double d1 = -n / ((n + 1.0) * (n + 1.0));
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 + v1 * h01 + d1 * h11;
}

double phi_cutoff_radial_derivative(double r, double n) {
    if (r <= n) return 0.0;
    if (r >= n + 1.0) return -n / (r * r);
    const double s = r - n;
    const double v1 = n / (n + 1.0);
    const double d1 = -n / ((n + 1.0) * (n + 1.0));
    const double dh00 = 6.0 * s * (s - 1.0);
    const double dh01 = 6.0 * s * (1.0 - s);
    const double dh11 = s * (3.0 * s - 2.0);
    return dh00 + v1 * dh01 + d1 * dh11;
}

namespace {

// sigma = C + C^T with C_ij = sq(i,k) * Sigma(l,j).
SymMat sigma_from_sq(const SymMat& sq, const Mat& sigma, int k, int l) {
    const int d = sq.dim();
    SymMat out(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            out.set(i, j, sq(i, k) * sigma(l, j) + sq(j, k) * sigma(l, i));
    return out;
}

}  // namespace

SymMat sigma_kl(const SymMat& x, const Mat& sigma, int k, int l) {
    return sigma_from_sq(sqrt_psd(x), sigma, k, l);
}

SymMat s_eps_n(const SymMat& x, double eps, double n) {
    if (eps < 0.0 || n < 1.0) throw std::invalid_argument("s_eps_n: need eps >= 0, n >= 1");
    const double phi = phi_cutoff(x.frobenius_norm(), n);
    const EigenDecomp e = eigen_sym(x);
    const double sq_eps = std::sqrt(eps);
    SymMat out(x.dim());
    for (int k = 0; k < x.dim(); ++k) {
        const double v = std::sqrt(std::max(phi * e.eigenvalues[k] + eps, 0.0)) - sq_eps;
        if (v == 0.0) continue;
        for (int i = 0; i < x.dim(); ++i)
            for (int j = i; j < x.dim(); ++j) out.add(i, j, v * e.rotation(i, k) * e.rotation(j, k));
    }
    return out;
}

SymMat sigma_kl_reg(const SymMat& x, const Mat& sigma, double eps, double n, int k, int l) {
    return sigma_from_sq(s_eps_n(x, eps, n), sigma, k, l);
}

SymMat strato_correction(const SymMat& x, const Mat& sigma, double eps, double n) {
    const int d = x.dim();
    const double r = x.frobenius_norm();
    const double phi = phi_cutoff(r, n);
    const EigenDecomp e = eigen_sym(x);
    const SymMat alpha = SymMat::from_mat(sigma.transpose() * sigma);

    SymMat corr(d);
    for (int i = 0; i < d; ++i) {
        const double lam_i = std::max(e.eigenvalues[i], 0.0);
        const double root_i = std::sqrt(phi * lam_i + eps);

        // U^i = alpha v_i v_i^T + v_i v_i^T alpha
        double coeff = 0.0;
        if (root_i > 0.0) coeff += phi * (root_i - std::sqrt(eps)) / root_i;
        for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            const double lam_j = std::max(e.eigenvalues[j], 0.0);
            const double root_j = std::sqrt(phi * lam_j + eps);
            const double denom = root_i + root_j;
            if (denom > 0.0) coeff += phi * (root_j - std::sqrt(eps)) / denom;
        }
        if (coeff != 0.0) {
            // 0.5 * coeff * U^i accumulated entrywise
            std::vector<double> av(d, 0.0);
            for (int m = 0; m < d; ++m)
                for (int q = 0; q < d; ++q) av[m] += alpha(m, q) * e.rotation(q, i);
            for (int m = 0; m < d; ++m)
                for (int q = m; q < d; ++q)
                    corr.add(m, q, 0.5 * coeff * (av[m] * e.rotation(q, i) + av[q] * e.rotation(m, i)));
        }
    }

    // Gradient-of-cutoff term; vanishes identically while ||x|| <= n.
    const double dphi = phi_cutoff_radial_derivative(r, n);
    if (dphi != 0.0 && r > 0.0) {
        const SymMat s = s_eps_n(x, eps, n);
        for (int i = 0; i < d; ++i) {
            const double lam_i = std::max(e.eigenvalues[i], 0.0);
            const double root_i = std::sqrt(phi * lam_i + eps);
            if (root_i == 0.0) continue;
            const double ci = lam_i / (2.0 * root_i);
            for (int k = 0; k < d; ++k) {
                for (int l = 0; l < d; ++l) {
                    const SymMat skl = sigma_from_sq(s, sigma, k, l);
                    const double grad_dot = dphi * inner(x, skl) / r;
                    if (grad_dot == 0.0) continue;
                    // Z^{ikl} = O_ki (v_i (Sigma^T e_l)^T + (Sigma^T e_l) v_i^T)
                    const double oki = e.rotation(k, i);
                    if (oki == 0.0) continue;
                    for (int m = 0; m < d; ++m)
                        for (int q = m; q < d; ++q)
                            corr.add(m, q, 0.5 * ci * grad_dot * oki *
                                               (e.rotation(m, i) * sigma(l, q) +
                                                e.rotation(q, i) * sigma(l, m)));
                }
            }
        }
    }
    return corr;
}

std::string AuditReport::to_text() const {
    std::ostringstream os;
    os << (jump_support_pass ? "pass" : "FAIL") << "  jump support      worst slack "
       << worst_jump_support << "\n";
    os << (sigma_normal_pass ? "pass" : "FAIL") << "  sigma tangential  worst defect "
       << worst_sigma_normal << "\n";
    os << (drift_pass ? "pass" : "FAIL") << "  inward drift      worst slack " << worst_drift_slack
       << "\n";
    os << (pass ? "viable" : "NOT viable") << "\n";
    return os.str();
}

AuditReport viability_audit(const AffineParams& p, double eps, double n,
                            int sample_boundary_points, uint64_t seed) {
    const int d = p.dim;
    const Mat sigma = sqrt_psd(p.alpha).to_mat();
    AuditReport rep;
    rep.worst_jump_support = std::numeric_limits<double>::infinity();
    rep.worst_sigma_normal = 0.0;
    rep.worst_drift_slack = std::numeric_limits<double>::infinity();
    rep.worst_cases.resize(3, AuditSample{SymMat(d), 0.0, 0.0, 0.0});

    if (d < 2) {
        // Boundary of S_1^+ is the origin; the only normal direction is u >= 0.
        sample_boundary_points = 0;
        const SymMat x(1);
        SymMat u = SymMat::identity(1);
        double slack = inner(p.b + p.drift.apply(x) - compensator_drift(p.mu, x) -
                                 strato_correction(x, sigma, eps, n),
                             u);
        rep.worst_drift_slack = slack;
        rep.worst_jump_support = 0.0;
    }

    for (int s = 0; s < sample_boundary_points; ++s) {
        CounterRng rng(seed, 2, static_cast<uint64_t>(s), CounterRng::kGeneric);
        const int rank = 1 + static_cast<int>(rng.uniform() * (d - 1));
        const SymMat x = random_boundary_point(rng, d, std::min(rank, d - 1));
        const std::vector<SymMat> gens = normal_cone_basis(x);

        double jump_slack = std::numeric_limits<double>::infinity();
        for (const ScalarAtom& a : p.m.atoms())
            jump_slack = std::min(jump_slack, min_eigenvalue(x + a.xi));
        for (const MatrixAtom& a : p.mu.atoms())
            jump_slack = std::min(jump_slack, min_eigenvalue(x + a.xi));
        if (p.m.empty() && p.mu.empty()) jump_slack = 0.0;

        double sigma_defect = 0.0;
        for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
                const SymMat skl = sigma_kl_reg(x, sigma, eps, n, k, l);
                for (const SymMat& u : gens)
                    sigma_defect = std::max(sigma_defect, std::abs(inner(skl, u)));
            }

        const SymMat net = p.b + p.drift.apply(x) - compensator_drift(p.mu, x) -
                           strato_correction(x, sigma, eps, n);
        double drift_slack = std::numeric_limits<double>::infinity();
        for (const SymMat& u : gens) drift_slack = std::min(drift_slack, inner(net, u));

        if (jump_slack < rep.worst_jump_support) {
            rep.worst_jump_support = jump_slack;
            rep.worst_cases[0] = {x, jump_slack, sigma_defect, drift_slack};
        }
        if (sigma_defect > rep.worst_sigma_normal) {
            rep.worst_sigma_normal = sigma_defect;
            rep.worst_cases[1] = {x, jump_slack, sigma_defect, drift_slack};
        }
        if (drift_slack < rep.worst_drift_slack) {
            rep.worst_drift_slack = drift_slack;
            rep.worst_cases[2] = {x, jump_slack, sigma_defect, drift_slack};
        }
    }

    rep.jump_support_pass = rep.worst_jump_support >= -1e-9;
    rep.sigma_normal_pass = rep.worst_sigma_normal <= 1e-9;
    rep.drift_pass = rep.worst_drift_slack >= -1e-9;
    rep.pass = rep.jump_support_pass && rep.sigma_normal_pass && rep.drift_pass;
    return rep;
}

namespace {

void simulate_range(const AffineParams& p, const SymMat& x0, const SimConfig& cfg,
                    long n_steps, const std::vector<long>& record_steps, PathEnsemble& out,
                    std::vector<double>& clamp_mass, int path_begin, int path_end) {
    const int d = p.dim;
    const Mat sigma = sqrt_psd(p.alpha).to_mat();
    const bool has_diffusion = p.alpha.frobenius_norm() > 0.0;
    const bool regularized = cfg.scheme == Scheme::euler_regularized;
    const double m_weight = p.m.total_weight();
    const size_t n_rec = record_steps.size();
    const double sqrt_dt = std::sqrt(cfg.dt);

    for (int path = path_begin; path < path_end; ++path) {
        double clamp_mass_total = 0.0;
        // One eigendecomposition per step: the projection at the end of a
        // step provides the basis the next step's square root needs.
        EigenDecomp eig = eigen_sym(x0);
        SymMat x(d);
        for (int k = 0; k < d; ++k) {
            const double lam = std::max(eig.eigenvalues[k], 0.0);
            eig.eigenvalues[k] = lam;
            if (lam == 0.0) continue;
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) x.add(i, j, lam * eig.rotation(i, k) * eig.rotation(j, k));
        }
        double survival = 1.0;
        size_t rec = 0;
        auto record = [&](long step) {
            while (rec < n_rec && record_steps[rec] == step) {
                out.states[static_cast<size_t>(path) * n_rec + rec] = x;
                ++rec;
            }
        };
        record(0);

        for (long step = 0; step < n_steps; ++step) {
            const double cutoff = regularized ? phi_cutoff(x.frobenius_norm(), cfg.cutoff_n) : 1.0;
            const SymMat x_eff = cutoff == 1.0 ? x : x * cutoff;

            // Drift net of the small-jump compensator.
            SymMat increment = p.b + p.drift.apply(x_eff) - compensator_drift(p.mu, x_eff);
            increment *= cfg.dt;

            if (has_diffusion) {
                SymMat sq(d);
                const double sq_eps = std::sqrt(cfg.eps);
                for (int k = 0; k < d; ++k) {
                    const double v = regularized
                                         ? std::sqrt(cutoff * eig.eigenvalues[k] + cfg.eps) - sq_eps
                                         : std::sqrt(eig.eigenvalues[k]);
                    if (v == 0.0) continue;
                    for (int i = 0; i < d; ++i)
                        for (int j = i; j < d; ++j)
                            sq.add(i, j, v * eig.rotation(i, k) * eig.rotation(j, k));
                }
                CounterRng rng(cfg.seed, static_cast<uint64_t>(path), static_cast<uint64_t>(step),
                               CounterRng::kDiffusion);
                Mat g(d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) g(i, j) = sqrt_dt * rng.normal();
                const Mat c = sq.to_mat() * g * sigma;
                for (int i = 0; i < d; ++i)
                    for (int j = i; j < d; ++j) increment.add(i, j, c(i, j) + c(j, i));
            }

            // At most one jump per step (thinning at step granularity).
            if (!p.m.empty() || !p.mu.empty()) {
                const std::vector<double> lam = kernel_intensity(p.mu, x_eff);
                double total = m_weight;
                for (double l : lam) total += l;
                if (total > 0.0) {
                    CounterRng rng(cfg.seed, static_cast<uint64_t>(path),
                                   static_cast<uint64_t>(step), CounterRng::kJump);
                    if (rng.uniform() < -std::expm1(-total * cfg.dt)) {
                        double pick = rng.uniform() * total;
                        int idx = -1;
                        char source = 'm';
                        for (size_t k = 0; k < p.m.atoms().size() && idx < 0; ++k) {
                            pick -= p.m.atoms()[k].weight;
                            if (pick <= 0.0) idx = static_cast<int>(k);
                        }
                        if (idx < 0) {
                            source = 'u';
                            for (size_t k = 0; k < lam.size() && idx < 0; ++k) {
                                pick -= lam[k];
                                if (pick <= 0.0) idx = static_cast<int>(k);
                            }
                            if (idx < 0) idx = static_cast<int>(lam.size()) - 1;
                        }
                        const SymMat& xi =
                            source == 'm' ? p.m.atoms()[idx].xi : p.mu.atoms()[idx].xi;
                        increment += xi;
                        out.jump_marks[path].push_back({(step + 1) * cfg.dt, idx, source});
                    }
                }
            }

            survival *= std::exp(-(p.c + inner(p.gamma, x)) * cfg.dt);

            SymMat x_new = x + increment;
            if (!x_new.all_finite()) {
                std::ostringstream os;
                os << "simulate_paths: non-finite state at path " << path << ", step " << step;
                throw std::runtime_error(os.str());
            }
            eig = eigen_sym(x_new);
            x = SymMat(d);
            for (int k = 0; k < d; ++k) {
                const double lam = eig.eigenvalues[k];
                if (lam <= 0.0) {
                    clamp_mass_total += -lam;
                    eig.eigenvalues[k] = 0.0;
                    continue;
                }
                for (int i = 0; i < d; ++i)
                    for (int j = i; j < d; ++j)
                        x.add(i, j, lam * eig.rotation(i, k) * eig.rotation(j, k));
            }
            record(step + 1);
        }
        out.survival[path] = survival;
        out.jump_marks[path].shrink_to_fit();
        clamp_mass[path] = n_steps > 0 ? clamp_mass_total / n_steps : 0.0;
    }
}

}  // namespace

PathEnsemble simulate_paths(const AffineParams& p, const SymMat& x0, const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_end >= cfg.dt) || cfg.n_paths < 1)
        throw std::invalid_argument("simulate_paths: invalid config");
    if (x0.dim() != p.dim) throw std::invalid_argument("simulate_paths: dimension mismatch");
    if (!is_psd(x0, 0.0)) throw std::invalid_argument("simulate_paths: x0 must be PSD");

    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    if (n_steps < 1) throw std::invalid_argument("simulate_paths: t_end shorter than dt");

    std::vector<double> grid = cfg.record_grid.empty() ? std::vector<double>{cfg.t_end}
                                                       : cfg.record_grid;
    std::vector<long> record_steps;
    record_steps.reserve(grid.size());
    for (double t : grid) {
        long s = std::lround(t / cfg.dt);
        s = std::clamp(s, 0L, n_steps);
        record_steps.push_back(s);
    }
    // Record steps must be nondecreasing for the single forward pass.
    for (size_t i = 1; i < record_steps.size(); ++i)
        if (record_steps[i] < record_steps[i - 1])
            throw std::invalid_argument("simulate_paths: record_grid must be nondecreasing");

    PathEnsemble out;
    out.grid = grid;
    out.dim = p.dim;
    out.n_paths = cfg.n_paths;
    out.seed = cfg.seed;
    out.states.assign(static_cast<size_t>(cfg.n_paths) * grid.size(), SymMat(p.dim));
    out.jump_marks.assign(cfg.n_paths, {});
    out.survival.assign(cfg.n_paths, 1.0);

    std::vector<double> clamp(cfg.n_paths, 0.0);

    int workers = cfg.workers;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, cfg.n_paths);

    if (workers == 1) {
        simulate_range(p, x0, cfg, n_steps, record_steps, out, clamp, 0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const int chunk = (cfg.n_paths + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int lo = w * chunk;
            const int hi = std::min(cfg.n_paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, w, lo, hi] {
                try {
                    simulate_range(p, x0, cfg, n_steps, record_steps, out, clamp, lo, hi);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }

    out.clamp_mass_mean = pairwise_sum(clamp.data(), clamp.size()) / cfg.n_paths;
    return out;
}

}  // namespace affine
