#include "affine/laplace.hpp"

#include <cmath>

namespace affine {

double laplace_transform(const AffineParams& p, const SymMat& x0, const SymMat& u, double t,
                         const RiccatiOptions& opts) {
    if (!is_psd(x0, 0.0)) throw std::invalid_argument("laplace_transform: x0 must be PSD");
    if (t < 0.0) throw std::invalid_argument("laplace_transform: negative time");
    if (t == 0.0) return std::exp(-inner(u, x0));
    const RiccatiSolution sol = solve_riccati(p, u, t, opts);
    return std::exp(-sol.phi_end() - inner(sol.psi_end(), x0));
}

double laplace_transform(const TransformQuery& q, const RiccatiOptions& opts) {
    return laplace_transform(q.params, q.x0, q.u, q.t, opts);
}

double generator_on_exponential(const AffineParams& p, const SymMat& u, const SymMat& x) {
    return (-F_of(p, u) - inner(R_of(p, u), x)) * std::exp(-inner(u, x));
}

double diffusion_symbol(const SymMat& x, const SymMat& alpha, int i, int j, int k, int l) {
    return x(i, k) * alpha(j, l) + x(i, l) * alpha(j, k) + x(j, k) * alpha(i, l) +
           x(j, l) * alpha(i, k);
}

namespace {

// Directional step along the symmetric basis direction c^{ij}
// (c^{ii} = E_ii, c^{ij} = E_ij + E_ji).
SymMat bump(const SymMat& x, int i, int j, double h) {
    SymMat y = x;
    y.add(i, j, h);
    return y;
}

}  // namespace

double generator_apply(const AffineParams& p, const std::function<double(const SymMat&)>& f,
                       const SymMat& x, double fd_step) {
    const int d = p.dim;
    if (x.dim() != d) throw std::invalid_argument("generator_apply: dimension mismatch");
    const double h = fd_step > 0.0 ? fd_step : 1e-4 * (1.0 + x.frobenius_norm());
    const double fx = f(x);
    if (!std::isfinite(fx)) throw std::runtime_error("generator_apply: f evaluation failed");

    // First derivatives in the unrestricted-entry convention:
    // df/dx_ij = D_{c^ij} f / (1 + delta_ij restored below via the
    // multiplicity bookkeeping); we keep the directional derivatives
    // D_(ij) f = d/dh f(x + h c^{ij}) and convert where needed.
    const int nfree = d * (d + 1) / 2;
    std::vector<double> grad_dir(nfree);
    std::vector<double> fplus(nfree), fminus(nfree);
    std::vector<std::pair<int, int>> coords;
    coords.reserve(nfree);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) coords.emplace_back(i, j);

    for (int a = 0; a < nfree; ++a) {
        const auto [i, j] = coords[a];
        fplus[a] = f(bump(x, i, j, h));
        fminus[a] = f(bump(x, i, j, -h));
        grad_dir[a] = (fplus[a] - fminus[a]) / (2.0 * h);
    }

    // Second directional derivatives H_ab = D_a D_b f by central differences.
    // The generator needs (1/2) sum over all unrestricted index pairs, which
    // collapses to (1/2) sum_{a,b over free coords} A(a,b) H_ab.
    double diffusion = 0.0;
    for (int a = 0; a < nfree; ++a) {
        const auto [i, j] = coords[a];
        for (int b = a; b < nfree; ++b) {
            const auto [k, l] = coords[b];
            const double aijkl = diffusion_symbol(x, p.alpha, i, j, k, l);
            if (aijkl == 0.0) continue;
            double hab;
            if (a == b) {
                hab = (fplus[a] - 2.0 * fx + fminus[a]) / (h * h);
            } else {
                const double fpp = f(bump(bump(x, i, j, h), k, l, h));
                const double fpm = f(bump(bump(x, i, j, h), k, l, -h));
                const double fmp = f(bump(bump(x, i, j, -h), k, l, h));
                const double fmm = f(bump(bump(x, i, j, -h), k, l, -h));
                hab = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            }
            diffusion += (a == b ? 0.5 : 1.0) * aijkl * hab;
        }
    }

    // Drift term sum_{ij} (b + B(x))_ij df/dx_ij = sum over free coords of
    // (b + B(x))_ij D_(ij) f (the multiplicity 2 and the 1/2 from the
    // convention cancel off-diagonal).
    const SymMat bx = p.b + p.drift.apply(x);
    double drift = 0.0;
    for (int a = 0; a < nfree; ++a) {
        const auto [i, j] = coords[a];
        drift += bx(i, j) * grad_dir[a];
    }

    double killing = -(p.c + inner(p.gamma, x)) * fx;

    double jumps = 0.0;
    for (const ScalarAtom& atom : p.m.atoms()) jumps += (f(x + atom.xi) - fx) * atom.weight;
    const std::vector<double> lam = kernel_intensity(p.mu, x);
    for (size_t kk = 0; kk < lam.size(); ++kk) {
        if (lam[kk] == 0.0) continue;
        const SymMat& xi = p.mu.atoms()[kk].xi;
        const SymMat cxi = chi(xi);
        double grad_term = 0.0;
        for (int a = 0; a < nfree; ++a) {
            const auto [i, j] = coords[a];
            grad_term += cxi(i, j) * grad_dir[a];
        }
        jumps += (f(x + xi) - fx - grad_term) * lam[kk];
    }

    return diffusion + drift + killing + jumps;
}

}  // namespace affine
