#include "affine/mc_compare.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace affine {

std::optional<std::pair<double, double>> wishart_pattern(const AffineParams& p) {
    if (!p.m.empty() || !p.mu.empty() || p.c != 0.0) return std::nullopt;
    if (p.gamma.frobenius_norm() != 0.0) return std::nullopt;
    if (!p.drift.is_zero(0.0)) return std::nullopt;
    const int d = p.dim;
    const double a = p.alpha(0, 0);
    const double beta = p.b(0, 0);
    if (a <= 0.0) return std::nullopt;
    if ((p.alpha - SymMat::identity(d) * a).frobenius_norm() > 1e-12 * (1.0 + std::abs(a)))
        return std::nullopt;
    if ((p.b - SymMat::identity(d) * beta).frobenius_norm() > 1e-12 * (1.0 + std::abs(beta)))
        return std::nullopt;
    const double delta = beta / a;
    if (delta < d - 1) return std::nullopt;
    return std::make_pair(a, delta);
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

CompareReport compare(const AffineParams& p, const SymMat& x0, const std::vector<SymMat>& u_list,
                      const std::vector<double>& t_list, const CompareConfig& cfg) {
    CompareReport rep;
    std::vector<double> times = t_list;
    std::sort(times.begin(), times.end());

    SimConfig sim = cfg.sim;
    sim.record_grid = times;
    const PathEnsemble ens = simulate_paths(p, x0, sim);

    const auto wish = wishart_pattern(p);
    rep.pass = true;
    for (size_t ti = 0; ti < times.size(); ++ti) {
        for (const SymMat& u : u_list) {
            CompareEntry e;
            e.t = times[ti];
            e.u = u;
            const PathEnsemble::Estimate est = ens.laplace_estimate(static_cast<int>(ti), u);
            e.mc = est.value;
            e.mc_stderr = est.stderr_;
            e.riccati = laplace_transform(p, x0, u, e.t, cfg.riccati);
            if (wish) e.closed_form = wishart_closed_form(wish->second, x0, u, wish->first * e.t).laplace;
            const double diff = e.mc - e.riccati;
            e.z_score = diff == 0.0 ? 0.0 : diff / std::max(e.mc_stderr, 1e-300);
            e.pass = std::abs(diff) <= 3.0 * e.mc_stderr + cfg.bias_budget;
            rep.pass = rep.pass && e.pass;
            rep.entries.push_back(std::move(e));
        }
    }

    if (!cfg.convergence_dts.empty() && !u_list.empty()) {
        const SymMat& u = u_list.front();
        const double t = times.back();
        const double riccati = laplace_transform(p, x0, u, t, cfg.riccati);
        for (double dt : cfg.convergence_dts) {
            ConvergenceRow row;
            row.dt = dt;
            row.bias_budget = cfg.bias_budget * (dt / 1e-3);
            std::vector<double> errs;
            double clamp = 0.0;
            for (int s = 0; s < cfg.convergence_seeds; ++s) {
                SimConfig sc = cfg.sim;
                sc.dt = dt;
                sc.t_end = t;
                sc.record_grid = {t};
                sc.seed = cfg.sim.seed + 7919ull * static_cast<uint64_t>(s + 1);
                const PathEnsemble e2 = simulate_paths(p, x0, sc);
                errs.push_back(std::abs(e2.laplace_estimate(0, u).value - riccati));
                clamp += e2.clamp_mass_mean;
            }
            row.abs_err = median(errs);
            row.clamp_mass = clamp / cfg.convergence_seeds;
            rep.convergence.push_back(row);
        }
    }
    return rep;
}

std::string CompareReport::to_text() const {
    std::ostringstream os;
    for (const CompareEntry& e : entries) {
        os << (e.pass ? "pass" : "FAIL") << "  t=" << e.t << "  mc=" << e.mc
           << " (se " << e.mc_stderr << ")  riccati=" << e.riccati;
        if (e.closed_form) os << "  closed=" << *e.closed_form;
        os << "  z=" << e.z_score << "\n";
    }
    for (const ConvergenceRow& r : convergence)
        os << "dt=" << r.dt << "  |mc-riccati|=" << r.abs_err << "  clamp=" << r.clamp_mass
           << "\n";
    os << (pass ? "all queries pass" : "SOME QUERIES FAIL") << "\n";
    return os.str();
}

}  // namespace affine
