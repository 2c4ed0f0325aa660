#include "affine/riccati.hpp"

#include <algorithm>
#include <cmath>

namespace affine {

double F_of(const AffineParams& p, const SymMat& u) {
    double f = inner(p.b, u) + p.c;
    for (const ScalarAtom& a : p.m.atoms()) f -= (std::exp(-inner(u, a.xi)) - 1.0) * a.weight;
    return f;
}

SymMat R_of(const AffineParams& p, const SymMat& u) {
    const Mat um = u.to_mat();
    const SymMat quad = SymMat::from_mat(um * p.alpha.to_mat() * um);
    SymMat r = p.drift.adjoint(u) + p.gamma - quad * 2.0;
    for (const MatrixAtom& a : p.mu.atoms()) {
        const double n = a.xi.frobenius_norm();
        const double denom = std::min(n * n, 1.0);
        const double integrand = std::exp(-inner(u, a.xi)) - 1.0 + inner(chi(a.xi), u);
        r -= a.weight * (integrand / denom);
    }
    return r;
}

namespace {

// Dormand-Prince coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 35.0 / 384 - 5179.0 / 57600, kE3 = 500.0 / 1113 - 7571.0 / 16695,
                 kE4 = 125.0 / 192 - 393.0 / 640, kE5 = -2187.0 / 6784 + 92097.0 / 339200,
                 kE6 = 11.0 / 84 - 187.0 / 2100, kE7 = -1.0 / 40;

using State = std::vector<double>;  // [phi, packed psi]

void axpy(State& y, double a, const State& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

RiccatiSolution solve_riccati(const AffineParams& p, const SymMat& u0, double t_end,
                              const RiccatiOptions& opts) {
    if (u0.dim() != p.dim) throw std::invalid_argument("solve_riccati: dimension mismatch");
    if (!(t_end > 0.0)) throw std::invalid_argument("solve_riccati: t_end must be positive");
    if (!is_psd(u0, 0.0)) throw std::invalid_argument("solve_riccati: u0 must be PSD");
    const int d = p.dim;
    const size_t n = 1 + u0.packed_size();

    auto unpack_psi = [&](const State& y) {
        SymMat psi(d);
        std::copy(y.begin() + 1, y.end(), psi.packed().begin());
        return psi;
    };
    auto deriv = [&](const State& y) {
        const SymMat psi = unpack_psi(y);
        State dy(n);
        dy[0] = F_of(p, psi);
        const SymMat r = R_of(p, psi);
        std::copy(r.packed().begin(), r.packed().end(), dy.begin() + 1);
        return dy;
    };

    RiccatiSolution sol;
    sol.u0 = u0;
    const int grid = std::max(opts.grid, 1);
    sol.times.reserve(grid + 1);
    sol.phi.reserve(grid + 1);
    sol.psi.reserve(grid + 1);
    sol.times.push_back(0.0);
    sol.phi.push_back(0.0);
    sol.psi.push_back(u0);

    State y(n, 0.0);
    std::copy(u0.packed().begin(), u0.packed().end(), y.begin() + 1);

    double t = 0.0;
    double h = std::min(opts.max_step, t_end / grid);
    double err_prev = 1.0;
    int sign_flips = 0;
    double last_lam_sign = 0.0;
    double min_lam = min_eigenvalue(u0);
    State k1 = deriv(y);
    bool k1_fresh = true;

    const double hmin = 1e-14 * std::max(t_end, 1.0);
    int next_grid = 1;
    while (next_grid <= grid) {
        const double t_target = t_end * next_grid / grid;
        bool hit_grid = false;
        double h_step = h;
        if (t + h_step >= t_target - 1e-15 * t_end) {
            h_step = t_target - t;
            hit_grid = true;
        }
        if (h_step < hmin)
            throw SolverError("solve_riccati: step size underflow at t = " + std::to_string(t), t);
        if (!k1_fresh) {
            k1 = deriv(y);
            k1_fresh = true;
        }

        State y2 = y;
        axpy(y2, h_step * kA21, k1);
        const State k2 = deriv(y2);
        State y3 = y;
        axpy(y3, h_step * kA31, k1);
        axpy(y3, h_step * kA32, k2);
        const State k3 = deriv(y3);
        State y4 = y;
        axpy(y4, h_step * kA41, k1);
        axpy(y4, h_step * kA42, k2);
        axpy(y4, h_step * kA43, k3);
        const State k4 = deriv(y4);
        State y5 = y;
        axpy(y5, h_step * kA51, k1);
        axpy(y5, h_step * kA52, k2);
        axpy(y5, h_step * kA53, k3);
        axpy(y5, h_step * kA54, k4);
        const State k5 = deriv(y5);
        State y6 = y;
        axpy(y6, h_step * kA61, k1);
        axpy(y6, h_step * kA62, k2);
        axpy(y6, h_step * kA63, k3);
        axpy(y6, h_step * kA64, k4);
        axpy(y6, h_step * kA65, k5);
        const State k6 = deriv(y6);

        State ynew = y;
        axpy(ynew, h_step * kB1, k1);
        axpy(ynew, h_step * kB3, k3);
        axpy(ynew, h_step * kB4, k4);
        axpy(ynew, h_step * kB5, k5);
        axpy(ynew, h_step * kB6, k6);
        const State k7 = deriv(ynew);

        double err = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double e = h_step * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                                       kE6 * k6[i] + kE7 * k7[i]);
            const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n);

        if (err > 1.0) {
            ++sol.diagnostics.rejected;
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            h = h_step * fac;
            continue;
        }

        SymMat psi_new = unpack_psi(ynew);
        double lam = min_eigenvalue(psi_new);
        if (lam <= -opts.atol) {
            // The exact flow stays in the cone; this step left it.
            ++sol.diagnostics.rejected;
            h = 0.5 * h_step;
            continue;
        }
        const double lam_raw = lam;
        bool repaired = false;
        if (lam < 0.0) {
            psi_new = project_psd(psi_new);
            std::copy(psi_new.packed().begin(), psi_new.packed().end(), ynew.begin() + 1);
            lam = 0.0;
            repaired = true;
        }

        t += h_step;
        y = ynew;
        k1 = k7;               // FSAL
        k1_fresh = !repaired;  // the clamp moved the state off k7's base point
        ++sol.diagnostics.accepted;
        min_lam = std::min(min_lam, lam);
        const double tiny = 1e3 * opts.atol;
        const double band =
            lam_raw > tiny ? 1.0 : (lam_raw < -tiny ? -1.0 : (lam_raw >= 0.0 ? 0.5 : -0.5));
        if (std::abs(band) == 0.5 && last_lam_sign * band < 0.0) ++sign_flips;
        last_lam_sign = band;
        if (hit_grid) {
            sol.times.push_back(t_target);
            sol.phi.push_back(y[0]);
            sol.psi.push_back(unpack_psi(y));
            t = t_target;
            ++next_grid;
        }

        // PI controller; the proposal is based on the step actually taken.
        double fac = 0.9 * std::pow(std::max(err, 1e-12), -0.2) *
                     std::pow(std::max(err_prev, 1e-12), 0.04);
        fac = std::clamp(fac, 0.2, 5.0);
        const double grown = (hit_grid && h > h_step) ? h : h_step * fac;
        h = std::min(grown, opts.max_step);
        err_prev = std::max(err, 1e-12);
    }

    sol.diagnostics.min_psi_eigenvalue = min_lam;
    sol.diagnostics.boundary_oscillation = sign_flips >= 8;
    return sol;
}

WishartValue wishart_closed_form(double delta, const SymMat& x, const SymMat& u, double t) {
    const int d = u.dim();
    if (x.dim() != d) throw std::invalid_argument("wishart_closed_form: dimension mismatch");
    if (t < 0.0) throw std::invalid_argument("wishart_closed_form: negative time");
    Mat m = Mat::identity(d);  // I + 2tu, invertible for u PSD and t >= 0
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) += 2.0 * t * u(i, j);
    WishartValue v;
    v.phi = 0.5 * delta * std::log(determinant(m));
    v.psi = SymMat::from_mat(inverse(m) * u.to_mat());
    v.laplace = std::exp(-v.phi - inner(v.psi, x));
    return v;
}

SemiflowReport check_semiflow(const AffineParams& p, const SymMat& u0, double t, double s,
                              double tol, const RiccatiOptions& opts) {
    SemiflowReport rep;
    if (s == 0.0 && t == 0.0) {
        rep.pass = true;
        return rep;
    }
    RiccatiSolution direct = t + s > 0.0 ? solve_riccati(p, u0, t + s, opts) : RiccatiSolution{};
    double phi_t = 0.0;
    SymMat psi_t = u0;
    if (t > 0.0) {
        RiccatiSolution first = solve_riccati(p, u0, t, opts);
        phi_t = first.phi_end();
        psi_t = first.psi_end();
    }
    double phi_comp = phi_t;
    SymMat psi_comp = psi_t;
    if (s > 0.0) {
        RiccatiSolution second = solve_riccati(p, project_psd(psi_t), s, opts);
        phi_comp += second.phi_end();
        psi_comp = second.psi_end();
    }
    rep.phi_defect = std::abs(direct.phi_end() - phi_comp);
    rep.psi_defect = (direct.psi_end() - psi_comp).frobenius_norm();
    rep.scale = 1.0 + direct.psi_end().frobenius_norm();
    rep.pass = rep.phi_defect <= tol * rep.scale && rep.psi_defect <= tol * rep.scale;
    return rep;
}

}  // namespace affine
