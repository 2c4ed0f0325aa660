#include "affine/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "affine/sampling.hpp"

namespace affine {

LinearDrift LinearDrift::zero(int d) {
    LinearDrift b;
    b.dim_ = d;
    b.beta_.assign(static_cast<size_t>(d) * (d + 1) / 2, SymMat(d));
    return b;
}

size_t LinearDrift::index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<size_t>(i) * dim_ - static_cast<size_t>(i) * (i - 1) / 2 + (j - i);
}

const SymMat& LinearDrift::beta(int i, int j) const { return beta_[index(i, j)]; }

void LinearDrift::set_beta(int i, int j, const SymMat& b) {
    if (b.dim() != dim_) throw std::invalid_argument("LinearDrift: dimension mismatch");
    beta_[index(i, j)] = b;
}

void LinearDrift::add_to_beta(int i, int j, const SymMat& delta) {
    beta_[index(i, j)] += delta;
}

bool LinearDrift::is_zero(double tol) const {
    for (const SymMat& b : beta_)
        if (b.frobenius_norm() > tol) return false;
    return true;
}

LinearDrift LinearDrift::from_linear_map(int d, const std::function<SymMat(const SymMat&)>& map) {
    LinearDrift out = zero(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            // Probe with c^{ij}; the x_ij and x_ji slots both carry beta^{ij},
            // hence the 1/2 on off-diagonal probes.
            SymMat probe(d);
            probe.set(i, j, 1.0);
            SymMat img = map(probe);
            if (i != j) img *= 0.5;
            out.beta_[out.index(i, j)] = img;
        }
    }
    return out;
}

LinearDrift LinearDrift::from_h(const Mat& h) {
    const int d = h.dim();
    return from_linear_map(d, [&](const SymMat& x) {
        // H x + x H^T = Hx + (Hx)^T for symmetric x.
        return SymMat::from_mat(sym_mul(h, x)) * 2.0;
    });
}

SymMat LinearDrift::apply(const SymMat& x) const {
    SymMat out(dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j) {
            const double w = (i == j ? 1.0 : 2.0) * x(i, j);
            if (w == 0.0) continue;
            const SymMat& b = beta_[index(i, j)];
            for (int r = 0; r < dim_; ++r)
                for (int s = r; s < dim_; ++s) out.add(r, s, w * b(r, s));
        }
    }
    return out;
}

SymMat LinearDrift::adjoint(const SymMat& u) const {
    SymMat out(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) out.set(i, j, inner(beta_[index(i, j)], u));
    return out;
}

double LinearDrift::adjoint_op_norm() const {
    if (dim_ == 0) return 0.0;
    // Power iteration on u -> B(B^T(u)), the adjoint pair w.r.t. <.,.>.
    SymMat v = SymMat::identity(dim_);
    double nv = v.frobenius_norm();
    if (nv == 0.0) return 0.0;
    v *= 1.0 / nv;
    double lam = 0.0;
    for (int it = 0; it < 60; ++it) {
        SymMat w = apply(adjoint(v));
        const double nw = w.frobenius_norm();
        if (nw < 1e-300) {
            // Identity in the kernel; restart from a generic direction.
            v = SymMat(dim_);
            for (int i = 0; i < dim_; ++i)
                for (int j = i; j < dim_; ++j) v.set(i, j, 1.0 + i + 2 * j);
            v *= 1.0 / v.frobenius_norm();
            continue;
        }
        lam = nw;
        w *= 1.0 / nw;
        v = w;
    }
    return std::sqrt(lam);
}

AffineParams make_diffusion_params(const SymMat& alpha, const SymMat& b, const LinearDrift& drift) {
    AffineParams p;
    p.dim = alpha.dim();
    p.alpha = alpha;
    p.b = b;
    p.drift = drift.dim() == 0 ? LinearDrift::zero(p.dim) : drift;
    p.c = 0.0;
    p.gamma = SymMat(p.dim);
    return p;
}

AffineParams make_wishart_params(int d, double delta) {
    return make_diffusion_params(SymMat::identity(d), SymMat::identity(d) * delta,
                                 LinearDrift::zero(d));
}

bool is_conservative(const AffineParams& p) {
    return p.c == 0.0 && p.gamma.frobenius_norm() == 0.0;
}

namespace {

void check_structure(const AffineParams& p) {
    if (p.dim <= 0) throw std::invalid_argument("AffineParams: dimension must be positive");
    if (p.alpha.dim() != p.dim || p.b.dim() != p.dim || p.gamma.dim() != p.dim ||
        p.drift.dim() != p.dim)
        throw std::invalid_argument("AffineParams: dimension mismatch");
    if (!p.m.empty() && p.m.dim() != p.dim)
        throw std::invalid_argument("AffineParams: m dimension mismatch");
    if (!p.mu.empty() && p.mu.dim() != p.dim)
        throw std::invalid_argument("AffineParams: mu dimension mismatch");
    if (!p.alpha.all_finite() || !p.b.all_finite() || !p.gamma.all_finite() ||
        !std::isfinite(p.c))
        throw std::invalid_argument("AffineParams: non-finite entries");
}

// Slack of the inward-pointing condition at a complementary pair (x, u).
double drift_pair_slack(const AffineParams& p, const SymMat& x, const SymMat& u) {
    double s = inner(p.drift.apply(x), u);
    const std::vector<double> lam = kernel_intensity(p.mu, x);
    for (size_t k = 0; k < lam.size(); ++k) {
        if (lam[k] == 0.0) continue;
        s -= inner(chi(p.mu.atoms()[k].xi), u) * lam[k];
    }
    return s;
}

// Deterministic orthogonal grid: identity plus Givens rotations at a few
// angles for every coordinate pair.
std::vector<Mat> orthogonal_grid(int d) {
    std::vector<Mat> grid;
    grid.push_back(Mat::identity(d));
    const double angles[] = {0.25 * 3.14159265358979323846, 3.14159265358979323846 / 3.0};
    for (int i = 0; i < d - 1; ++i) {
        for (int j = i + 1; j < d; ++j) {
            for (double a : angles) {
                Mat g = Mat::identity(d);
                g(i, i) = std::cos(a);
                g(j, j) = std::cos(a);
                g(i, j) = -std::sin(a);
                g(j, i) = std::sin(a);
                grid.push_back(g);
            }
        }
    }
    return grid;
}

// Worst slack of the inward-pointing condition over complementary pairs
// built from the rotation o: x supported on the leading eigvec block, u on
// the trailing one, for every split rank.
double min_slack_for_rotation(const AffineParams& p, const Mat& o, CounterRng& rng) {
    const int d = p.dim;
    double worst = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= d - 1; ++r) {
        // x-rank = r; null space dimension d - r.
        SymMat x(d), u(d);
        for (int k = 0; k < r; ++k) {
            const double lam = 0.2 + rng.uniform();
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) x.add(i, j, lam * o(i, k) * o(j, k));
        }
        for (int k = r; k < d; ++k) {
            const double w = 0.2 + rng.uniform();
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) u.add(i, j, w * o(i, k) * o(j, k));
        }
        worst = std::min(worst, drift_pair_slack(p, x, u));
        // Also exercise the rank-one normal directions individually.
        for (int k = r; k < d; ++k) {
            SymMat uk(d);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) uk.set(i, j, o(i, k) * o(j, k));
            worst = std::min(worst, drift_pair_slack(p, x, uk));
        }
    }
    return worst;
}

}  // namespace

ValidationReport validate_admissible(const AffineParams& p, int n_random_pairs, uint64_t seed) {
    check_structure(p);
    const int d = p.dim;
    ValidationReport rep;
    auto push = [&](std::string id, std::string what, bool pass, double slack, std::string note = "") {
        rep.conditions.push_back({std::move(id), std::move(what), pass, slack, std::move(note)});
    };

    const double lam_alpha = min_eigenvalue(p.alpha);
    push("(2.2)", "diffusion alpha PSD", is_psd(p.alpha, 0.0), lam_alpha);

    SymMat drift_gap = p.b - p.alpha * static_cast<double>(d - 1);
    const double lam_gap = min_eigenvalue(drift_gap);
    push("(2.3)", "constant drift b >= (d-1) alpha", is_psd(drift_gap, 1e-10), lam_gap);

    push("(2.4)", "constant killing rate c >= 0", p.c >= 0.0, p.c);

    const double lam_gamma = min_eigenvalue(p.gamma);
    push("(gamma)", "linear killing rate gamma PSD", is_psd(p.gamma, 0.0), lam_gamma);

    // Finite atom lists: the moment integrals are finite sums, so only atom
    // validity can fail, and the measure constructors enforce it.
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (const ScalarAtom& a : p.m.atoms()) {
            const double lam = min_eigenvalue(a.xi);
            worst = std::min(worst, lam);
            ok = ok && is_psd(a.xi, 0.0) && a.xi.frobenius_norm() > 0.0 && a.weight > 0.0;
        }
        push("(2.5)", "constant jump measure m supported on the cone", ok,
             p.m.empty() ? 0.0 : worst, "finite atoms: moment condition automatic");
    }
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (const MatrixAtom& a : p.mu.atoms()) {
            const double lw = min_eigenvalue(a.weight);
            worst = std::min(worst, std::min(lw, min_eigenvalue(a.xi)));
            ok = ok && is_psd(a.weight, 0.0) && is_psd(a.xi, 0.0) && a.xi.frobenius_norm() > 0.0;
        }
        push("(2.6)", "linear jump coefficient mu PSD-valued on the cone", ok,
             p.mu.empty() ? 0.0 : worst);
    }
    push("(2.7)", "kernel truncation integrability", true, 0.0,
         "finite atoms: integral is a finite sum");

    // (2.9a) exact necessary diagonal-deletion condition.
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        if (d >= 2) {
            for (int i = 0; i < d; ++i) {
                SymMat reduced(d - 1);
                const SymMat& bii = p.drift.beta(i, i);
                auto del = [&](int r) { return r < i ? r : r + 1; };
                for (int r = 0; r < d - 1; ++r)
                    for (int s = r; s < d - 1; ++s) reduced.set(r, s, bii(del(r), del(s)));
                for (const MatrixAtom& a : p.mu.atoms()) {
                    const double n = a.xi.frobenius_norm();
                    const double coeff = a.weight(i, i) / std::min(n * n, 1.0);
                    if (coeff == 0.0) continue;
                    const SymMat cxi = chi(a.xi);
                    for (int r = 0; r < d - 1; ++r)
                        for (int s = r; s < d - 1; ++s)
                            reduced.add(r, s, -coeff * cxi(del(r), del(s)));
                }
                const double lam = min_eigenvalue(reduced);
                worst = std::min(worst, lam);
                ok = ok && lam >= -1e-9;
            }
        } else {
            worst = 0.0;
        }
        push("(2.9a)", "diagonal-deletion drift condition", ok, worst);
    }

    // (2.9b) structured and randomized complementary pairs.
    {
        double worst = std::numeric_limits<double>::infinity();
        if (d >= 2) {
            CounterRng grid_rng(seed, 0, 0, CounterRng::kGeneric);
            for (const Mat& o : orthogonal_grid(d))
                worst = std::min(worst, min_slack_for_rotation(p, o, grid_rng));
            for (int k = 0; k < n_random_pairs; ++k) {
                CounterRng rng(seed, 1, static_cast<uint64_t>(k), CounterRng::kGeneric);
                const Mat o = random_orthogonal(rng, d);
                worst = std::min(worst, min_slack_for_rotation(p, o, rng));
            }
        } else {
            worst = 0.0;  // d = 1: boundary is {0}, B(0) = 0
        }
        rep.worst_drift_slack = worst;
        push("(2.9)", "inward-pointing drift on complementary pairs", worst >= -1e-9, worst,
             "sampled necessary check; see (2.9a) for the exact part");
    }

    rep.pass = true;
    for (const ConditionReport& c : rep.conditions) rep.pass = rep.pass && c.pass;
    return rep;
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    for (const ConditionReport& c : conditions) {
        os << (c.pass ? "pass" : "FAIL") << "  " << c.id << "  " << c.what
           << "  slack=" << c.slack;
        if (!c.note.empty()) os << "  [" << c.note << "]";
        os << "\n";
    }
    os << (pass ? "admissible" : "NOT admissible") << "\n";
    return os.str();
}

AffineParams transform(const AffineParams& p, const Mat& g) {
    check_structure(p);
    if (g.dim() != p.dim) throw std::invalid_argument("transform: dimension mismatch");
    const double det = determinant(g);
    if (std::abs(det) <= 1e-12) throw std::invalid_argument("transform: singular g");
    const Mat gt = g.transpose();
    const Mat gi = inverse(g);
    const Mat git = gi.transpose();

    AffineParams q;
    q.dim = p.dim;
    q.alpha = congruence(g, p.alpha);
    q.b = congruence(g, p.b);
    q.c = p.c;
    q.gamma = congruence(git, p.gamma);

    // B~(x) = g B(g^{-1} x g^{-T}) g^T, i.e. the adjoint transforms as
    // B~^T(u) = g^{-T} B^T(g^T u g) g^{-1}.
    const LinearDrift& base = p.drift;
    q.drift = LinearDrift::from_linear_map(p.dim, [&](const SymMat& x) {
        return congruence(g, base.apply(congruence(gi, x)));
    });

    std::vector<ScalarAtom> matoms;
    for (const ScalarAtom& a : p.m.atoms())
        matoms.push_back({congruence(g, a.xi), a.weight});
    q.m = ScalarAtomMeasure(std::move(matoms));

    std::vector<MatrixAtom> muatoms;
    for (const MatrixAtom& a : p.mu.atoms()) {
        const SymMat xi_new = congruence(g, a.xi);
        const double n_old = a.xi.frobenius_norm(), n_new = xi_new.frobenius_norm();
        const double ratio = std::min(n_new * n_new, 1.0) / std::min(n_old * n_old, 1.0);
        muatoms.push_back({xi_new, congruence(git, a.weight) * ratio});
    }
    q.mu = MatrixAtomMeasure(std::move(muatoms));

    // The transformed parameters come with the induced truncation
    // chi~(xi) = g chi(g^{-1} xi g^{-T}) g^T; shift the linear drift by the
    // exact compensator difference so q is expressed w.r.t. the standard chi.
    // The correction per atom is
    //   beta~^{ij} += (W~_k)_{ij} [chi(xi~_k) - chi~(xi~_k)] / (||xi~_k||^2 ^ 1);
    // chi~(xi~_k) = xi~_k 1{||xi_k|| <= 1}.
    for (size_t k = 0; k < q.mu.atoms().size(); ++k) {
        const SymMat& xi_new = q.mu.atoms()[k].xi;
        const SymMat& w_new = q.mu.atoms()[k].weight;
        const bool small_new = xi_new.frobenius_norm() <= 1.0;
        const bool small_old = p.mu.atoms()[k].xi.frobenius_norm() <= 1.0;
        if (small_new == small_old) continue;
        const double n_new = xi_new.frobenius_norm();
        const double denom = std::min(n_new * n_new, 1.0);
        const double factor = (small_new ? 1.0 : 0.0) - (small_old ? 1.0 : 0.0);
        for (int i = 0; i < q.dim; ++i)
            for (int j = i; j < q.dim; ++j) {
                const double coeff = factor * w_new(i, j) / denom;
                if (coeff == 0.0) continue;
                q.drift.add_to_beta(i, j, xi_new * coeff);
            }
    }
    return q;
}

CanonicalResult canonicalize(const AffineParams& p, double rank_tol) {
    check_structure(p);
    const int d = p.dim;
    const EigenDecomp ea = eigen_sym(p.alpha);
    const double lmax = std::max(ea.eigenvalues[0], 0.0);
    const double thresh = rank_tol * std::max(lmax, 1e-300);

    int r = 0;
    for (int k = 0; k < d; ++k)
        if (ea.eigenvalues[k] > thresh) ++r;
    // Refuse tolerance-ambiguous ranks: an eigenvalue within a factor 10 of
    // the threshold could land on either side.
    for (int k = 0; k < d; ++k) {
        const double lam = ea.eigenvalues[k];
        if (lam > thresh / 10.0 && lam <= thresh * 10.0 && lmax > 0.0)
            throw std::runtime_error("canonicalize: rank of alpha is tolerance-ambiguous; choose rank_tol explicitly");
    }

    // Whiten the range of alpha: g1 alpha g1^T = I_r^d.
    Mat g1(d);
    for (int k = 0; k < d; ++k) {
        const double s = k < r ? 1.0 / std::sqrt(ea.eigenvalues[k]) : 1.0;
        for (int j = 0; j < d; ++j) g1(k, j) = s * ea.rotation(j, k);
    }
    const SymMat b1 = congruence(g1, p.b);

    // Within the range and null blocks, diagonalize b1 while preserving
    // I_r^d: transforms [[A, B], [0, D]] with A in O(r). Choosing
    // B = -A b12 b22^+ leaves the Schur complement in the range block; A and
    // D then diagonalize the Schur complement and b22.
    SymMat b11(r), b22(d - r);
    Mat b12(d);  // only the r x (d-r) corner is used
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) b11.set(i, j, b1(i, j));
    for (int i = r; i < d; ++i)
        for (int j = i; j < d; ++j) b22.set(i - r, j - r, b1(i, j));
    for (int i = 0; i < r; ++i)
        for (int j = r; j < d; ++j) b12(i, j - r) = b1(i, j);

    Mat g2 = Mat::identity(d);
    std::vector<double> theta(d, 0.0);
    const int nr = d - r;

    EigenDecomp e22;
    Mat pinv22(nr);
    if (nr > 0) {
        e22 = eigen_sym(b22);
        // Moore-Penrose inverse of the PSD null block.
        const double cut = 1e-12 * std::max(e22.eigenvalues.empty() ? 0.0 : e22.eigenvalues[0], 1e-300);
        for (int a = 0; a < nr; ++a)
            for (int bcol = 0; bcol < nr; ++bcol) {
                double v = 0.0;
                for (int k = 0; k < nr; ++k)
                    if (e22.eigenvalues[k] > cut)
                        v += e22.rotation(a, k) * e22.rotation(bcol, k) / e22.eigenvalues[k];
                pinv22(a, bcol) = v;
            }
    }

    // Schur complement b11 - b12 b22^+ b12^T on the range block.
    SymMat schur = b11;
    if (r > 0 && nr > 0) {
        Mat tmp(d);  // r x nr: b12 * pinv22
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < nr; ++j) {
                double v = 0.0;
                for (int k = 0; k < nr; ++k) v += b12(i, k) * pinv22(k, j);
                tmp(i, j) = v;
            }
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j) {
                double v = 0.0;
                for (int k = 0; k < nr; ++k) v += tmp(i, k) * b12(j, k);
                schur.add(i, j, -v);
            }
    }
    EigenDecomp es;
    if (r > 0) es = eigen_sym(schur);

    // Assemble g2 = [[A, B], [0, D]], A = es.rotation^T, D = e22.rotation^T,
    // B = -A b12 b22^+.
    for (int i = 0; i < r; ++i) {
        theta[i] = es.eigenvalues[i];
        for (int j = 0; j < r; ++j) g2(i, j) = es.rotation(j, i);
    }
    for (int i = 0; i < nr; ++i) {
        theta[r + i] = e22.eigenvalues[i];
        for (int j = 0; j < nr; ++j) g2(r + i, r + j) = e22.rotation(j, i);
    }
    if (r > 0 && nr > 0) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < nr; ++j) {
                double v = 0.0;
                for (int a = 0; a < r; ++a)
                    for (int k = 0; k < nr; ++k)
                        v += es.rotation(a, i) * b12(a, k) * pinv22(k, j);
                g2(i, r + j) = -v;
            }
    }

    CanonicalResult out;
    out.g = g2 * g1;
    out.params = transform(p, out.g);
    // Snap the exactly-known entries; congruence roundoff otherwise leaves
    // 1e-16-level noise on the canonical blocks.
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            out.params.alpha.set(i, j, (i == j && i < r) ? 1.0 : 0.0);
            if (i != j) out.params.b.set(i, j, 0.0);
        }
    return out;
}

double growth_bound_constant(const AffineParams& p) {
    double jumps = 0.0;
    for (const MatrixAtom& a : p.mu.atoms()) jumps += a.weight.frobenius_norm();
    return 2.0 * (p.drift.adjoint_op_norm() + p.gamma.frobenius_norm() + jumps);
}

}  // namespace affine
