#include "affine/sym_mat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace affine {

Mat Mat::transpose() const {
    Mat t(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat Mat::operator*(const Mat& rhs) const {
    const int d = dim_;
    Mat r(d);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < d; ++j) r(i, j) += aik * rhs(k, j);
        }
    }
    return r;
}

Mat& Mat::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

Mat Mat::operator-(const Mat& rhs) const {
    Mat r(dim_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - rhs.a_[k];
    return r;
}

double Mat::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

Mat inverse(const Mat& g) {
    const int d = g.dim();
    Mat a = g;
    Mat inv = Mat::identity(d);
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-300)
            throw std::invalid_argument("inverse: singular matrix");
        if (piv != col) {
            for (int j = 0; j < d; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const double p = a(col, col);
        for (int j = 0; j < d; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < d; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

double determinant(const Mat& g) {
    const int d = g.dim();
    Mat a = g;
    double det = 1.0;
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) return 0.0;
        if (piv != col) {
            for (int j = 0; j < d; ++j) std::swap(a(piv, j), a(col, j));
            det = -det;
        }
        det *= a(col, col);
        for (int r = col + 1; r < d; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < d; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

SymMat& SymMat::operator+=(const SymMat& rhs) {
    if (rhs.dim_ != dim_) throw std::invalid_argument("SymMat: dimension mismatch");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
}

SymMat& SymMat::operator-=(const SymMat& rhs) {
    if (rhs.dim_ != dim_) throw std::invalid_argument("SymMat: dimension mismatch");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
}

SymMat& SymMat::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

double SymMat::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j) {
            const double v = (*this)(i, j);
            s += (i == j ? 1.0 : 2.0) * v * v;
        }
    }
    return std::sqrt(s);
}

bool SymMat::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

double inner(const SymMat& x, const SymMat& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("inner: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < x.dim(); ++i) {
        s += x(i, i) * y(i, i);
        for (int j = i + 1; j < x.dim(); ++j) s += 2.0 * x(i, j) * y(i, j);
    }
    return s;
}

namespace {

// One cyclic Jacobi sweep over the strict upper triangle of a (full storage),
// accumulating rotations into v.
void jacobi_sweep(std::vector<double>& a, std::vector<double>& v, int d) {
    auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * d + j]; };
    auto V = [&](int i, int j) -> double& { return v[static_cast<size_t>(i) * d + j]; };
    for (int p = 0; p < d - 1; ++p) {
        for (int q = p + 1; q < d; ++q) {
            const double apq = A(p, q);
            if (apq == 0.0) continue;
            const double app = A(p, p), aqq = A(q, q);
            const double theta = 0.5 * (aqq - app) / apq;
            double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
            if (theta < 0.0) t = -t;
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            const double tau = s / (1.0 + c);
            A(p, p) = app - t * apq;
            A(q, q) = aqq + t * apq;
            A(p, q) = 0.0;
            A(q, p) = 0.0;
            for (int k = 0; k < d; ++k) {
                if (k != p && k != q) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = akp - s * (akq + tau * akp);
                    A(p, k) = A(k, p);
                    A(k, q) = akq + s * (akp - tau * akq);
                    A(q, k) = A(k, q);
                }
                const double vkp = V(k, p), vkq = V(k, q);
                V(k, p) = vkp - s * (vkq + tau * vkp);
                V(k, q) = vkq + s * (vkp - tau * vkq);
            }
        }
    }
}

double off_norm(const std::vector<double>& a, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double v = a[static_cast<size_t>(i) * d + j];
            s += 2.0 * v * v;
        }
    return std::sqrt(s);
}

}  // namespace

EigenDecomp eigen_sym(const SymMat& x) {
    const int d = x.dim();
    if (!x.all_finite()) throw std::invalid_argument("eigen_sym: non-finite entries");
    std::vector<double> a(static_cast<size_t>(d) * d), v(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) {
        v[static_cast<size_t>(i) * d + i] = 1.0;
        for (int j = 0; j < d; ++j) a[static_cast<size_t>(i) * d + j] = x(i, j);
    }
    const double norm = x.frobenius_norm();
    const double thresh = 1e-14 * norm;
    for (int sweep = 0; sweep < 64 && d > 1; ++sweep) {
        if (off_norm(a, d) <= thresh) break;
        jacobi_sweep(a, v, d);
    }

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return a[static_cast<size_t>(i) * d + i] > a[static_cast<size_t>(j) * d + j];
    });

    EigenDecomp e;
    e.rotation = Mat(d);
    e.eigenvalues.resize(d);
    for (int c = 0; c < d; ++c) {
        const int src = order[c];
        e.eigenvalues[c] = a[static_cast<size_t>(src) * d + src];
        // Sign convention: first component over 1e-12 of the column max is
        // made positive.
        double colmax = 0.0;
        for (int r = 0; r < d; ++r) colmax = std::max(colmax, std::abs(v[static_cast<size_t>(r) * d + src]));
        double sign = 1.0;
        for (int r = 0; r < d; ++r) {
            const double val = v[static_cast<size_t>(r) * d + src];
            if (std::abs(val) > 1e-12 * colmax) {
                sign = val > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (int r = 0; r < d; ++r) e.rotation(r, c) = sign * v[static_cast<size_t>(r) * d + src];
    }
    return e;
}

double min_eigenvalue(const SymMat& x) {
    if (x.dim() == 0) return 0.0;
    return eigen_sym(x).eigenvalues.back();
}

bool is_psd(const SymMat& x, double tol) {
    if (tol < 0.0) throw std::invalid_argument("is_psd: negative tolerance");
    if (!x.all_finite()) return false;
    if (x.dim() == 0) return true;
    const double scale = 1.0 + x.frobenius_norm();
    const double floor = 32.0 * std::numeric_limits<double>::epsilon() * scale;
    return min_eigenvalue(x) >= -(tol * scale + floor);
}

SymMat sqrt_psd(const SymMat& x) {
    const EigenDecomp e = eigen_sym(x);
    const double lim = tol_default(x);
    SymMat r(x.dim());
    for (int k = 0; k < x.dim(); ++k) {
        if (e.eigenvalues[k] < -lim)
            throw std::invalid_argument("sqrt_psd: matrix is not positive semidefinite");
        const double s = std::sqrt(std::max(e.eigenvalues[k], 0.0));
        for (int i = 0; i < x.dim(); ++i)
            for (int j = i; j < x.dim(); ++j)
                r.add(i, j, s * e.rotation(i, k) * e.rotation(j, k));
    }
    return r;
}

SymMat project_psd(const SymMat& x, double* clamped_mass) {
    const EigenDecomp e = eigen_sym(x);
    SymMat r(x.dim());
    double mass = 0.0;
    for (int k = 0; k < x.dim(); ++k) {
        const double lam = e.eigenvalues[k];
        if (lam <= 0.0) {
            mass += -lam;
            continue;
        }
        for (int i = 0; i < x.dim(); ++i)
            for (int j = i; j < x.dim(); ++j)
                r.add(i, j, lam * e.rotation(i, k) * e.rotation(j, k));
    }
    if (clamped_mass) *clamped_mass = mass;
    return r;
}

SymMat project_psd(const SymMat& x) { return project_psd(x, nullptr); }

std::vector<SymMat> normal_cone_basis(const SymMat& x, double rank_tol) {
    const int d = x.dim();
    const EigenDecomp e = eigen_sym(x);
    const double lmax = d > 0 ? std::max(e.eigenvalues[0], 0.0) : 0.0;
    const double cut = rank_tol * lmax + 32.0 * std::numeric_limits<double>::epsilon() * (1.0 + lmax);
    std::vector<int> null_idx;
    for (int k = 0; k < d; ++k)
        if (e.eigenvalues[k] <= cut) null_idx.push_back(k);

    std::vector<SymMat> gens;
    // PSD basis e^{ab} of the null block: e^{aa} = E_aa,
    // e^{ab} = E_aa + E_ab + E_ba + E_bb for a < b; conjugated back by O.
    for (size_t ai = 0; ai < null_idx.size(); ++ai) {
        for (size_t bi = ai; bi < null_idx.size(); ++bi) {
            const int a = null_idx[ai], b = null_idx[bi];
            SymMat u(d);
            for (int i = 0; i < d; ++i) {
                for (int j = i; j < d; ++j) {
                    double v = e.rotation(i, a) * e.rotation(j, a);
                    if (b != a)
                        v += e.rotation(i, b) * e.rotation(j, b) +
                             e.rotation(i, a) * e.rotation(j, b) +
                             e.rotation(i, b) * e.rotation(j, a);
                    u.set(i, j, v);
                }
            }
            gens.push_back(std::move(u));
        }
    }
    return gens;
}

namespace {

// Minor with one row/column deleted, as a general matrix determinant.
double deleted_minor(const SymMat& y, int row, int col) {
    const int d = y.dim();
    Mat m(d - 1);
    int ri = 0;
    for (int i = 0; i < d; ++i) {
        if (i == row) continue;
        int cj = 0;
        for (int j = 0; j < d; ++j) {
            if (j == col) continue;
            m(ri, cj) = y(i, j);
            ++cj;
        }
        ++ri;
    }
    return determinant(m);
}

}  // namespace

SymMat det_gradient(const SymMat& y) {
    const int d = y.dim();
    SymMat g(d);
    if (d == 1) {
        g.set(0, 0, 1.0);
        return g;
    }
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            g.set(i, j, sign * deleted_minor(y, i, j));
        }
    return g;
}

double det_second_pair(const SymMat& y, int i, int j) {
    const int d = y.dim();
    if (i < 0 || j < 0 || i >= d || j >= d) throw std::invalid_argument("det_second_pair: index out of range");
    if (i == j) return 0.0;  // det is multilinear in entries
    if (d == 2) return -1.0;
    Mat m(d - 2);
    int ri = 0;
    for (int r = 0; r < d; ++r) {
        if (r == i || r == j) continue;
        int cj = 0;
        for (int c = 0; c < d; ++c) {
            if (c == i || c == j) continue;
            m(ri, cj) = y(r, c);
            ++cj;
        }
        ++ri;
    }
    return -determinant(m);
}

SymMat congruence(const Mat& g, const SymMat& x) {
    return SymMat::from_mat(g * x.to_mat() * g.transpose());
}

Mat sym_mul(const SymMat& x, const Mat& m) { return x.to_mat() * m; }
Mat sym_mul(const Mat& m, const SymMat& x) { return m * x.to_mat(); }

SymMat sandwich(const SymMat& x, const SymMat& y) {
    return SymMat::from_mat(x.to_mat() * y.to_mat() * x.to_mat());
}

}  // namespace affine
