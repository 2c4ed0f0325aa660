#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace affine {

// Dense general d x d matrix, row-major. Used for rotations, transformation
// matrices and intermediate products; symmetric values live in SymMat.
class Mat {
public:
    Mat() : dim_(0) {}
    explicit Mat(int d) : dim_(d), a_(static_cast<size_t>(d) * d, 0.0) {
        if (d < 0) throw std::invalid_argument("Mat: negative dimension");
    }

    static Mat identity(int d) {
        Mat m(d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

    Mat transpose() const;
    Mat operator*(const Mat& rhs) const;
    Mat& operator*=(double s);
    Mat operator-(const Mat& rhs) const;
    double frobenius_norm() const;

    const std::vector<double>& data() const { return a_; }

private:
    int dim_;
    std::vector<double> a_;
};

// Gaussian elimination with partial pivoting.
Mat inverse(const Mat& g);
double determinant(const Mat& g);

// Symmetric d x d matrix; only the upper triangle is stored (row-major), so
// symmetry is structural. Entry access is symmetric in (i, j).
class SymMat {
public:
    SymMat() : dim_(0) {}
    explicit SymMat(int d) : dim_(d), a_(static_cast<size_t>(d) * (d + 1) / 2, 0.0) {
        if (d < 0) throw std::invalid_argument("SymMat: negative dimension");
    }

    static SymMat identity(int d) {
        SymMat x(d);
        for (int i = 0; i < d; ++i) x.set(i, i, 1.0);
        return x;
    }
    static SymMat diag(const std::vector<double>& v) {
        SymMat x(static_cast<int>(v.size()));
        for (int i = 0; i < x.dim_; ++i) x.set(i, i, v[i]);
        return x;
    }
    // Symmetrizes (m + m^T)/2 to absorb roundoff from general products.
    static SymMat from_mat(const Mat& m) {
        SymMat x(m.dim());
        for (int i = 0; i < m.dim(); ++i)
            for (int j = i; j < m.dim(); ++j) x.set(i, j, 0.5 * (m(i, j) + m(j, i)));
        return x;
    }

    int dim() const { return dim_; }
    size_t packed_size() const { return a_.size(); }

    double operator()(int i, int j) const {
        return i <= j ? a_[index(i, j)] : a_[index(j, i)];
    }
    void set(int i, int j, double v) {
        if (i <= j) a_[index(i, j)] = v; else a_[index(j, i)] = v;
    }
    void add(int i, int j, double v) {
        if (i <= j) a_[index(i, j)] += v; else a_[index(j, i)] += v;
    }

    // Packed upper triangle, row-major: x11, x12, ..., x1d, x22, ...
    std::vector<double>& packed() { return a_; }
    const std::vector<double>& packed() const { return a_; }

    Mat to_mat() const {
        Mat m(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    SymMat& operator+=(const SymMat& rhs);
    SymMat& operator-=(const SymMat& rhs);
    SymMat& operator*=(double s);
    SymMat operator+(const SymMat& rhs) const { SymMat r = *this; r += rhs; return r; }
    SymMat operator-(const SymMat& rhs) const { SymMat r = *this; r -= rhs; return r; }
    SymMat operator*(double s) const { SymMat r = *this; r *= s; return r; }
    SymMat operator-() const { SymMat r = *this; r *= -1.0; return r; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }
    double frobenius_norm() const;
    bool all_finite() const;

private:
    size_t index(int i, int j) const {
        // i <= j, 0-based: row offset i*d - i(i-1)/2 plus (j - i)
        return static_cast<size_t>(i) * dim_ - static_cast<size_t>(i) * (i - 1) / 2 + (j - i);
    }

    int dim_;
    std::vector<double> a_;
};

inline SymMat operator*(double s, const SymMat& x) { return x * s; }

// <x, y> = tr(xy); for symmetric matrices this is the full elementwise sum.
double inner(const SymMat& x, const SymMat& y);

// Orthogonal diagonalization x = O diag(eigenvalues) O^T, eigenvalues
// descending. Column signs fixed so the first nonzero component of each
// eigenvector is positive, making the decomposition reproducible.
struct EigenDecomp {
    Mat rotation;
    std::vector<double> eigenvalues;
};

// Cyclic Jacobi rotations; converges when off(A) <= 1e-14 * ||A||_F.
EigenDecomp eigen_sym(const SymMat& x);

double min_eigenvalue(const SymMat& x);

// Relative default tolerance: simulated states grow, so absolute thresholds
// do not travel well.
inline double tol_default(const SymMat& x) { return 1e-10 * (1.0 + x.frobenius_norm()); }

// lambda_min(x) >= -tol*(1+||x||_F), with an intrinsic floor at machine
// precision (computed eigenvalues carry O(eps*||x||) error, so an exact zero
// is not observable).
bool is_psd(const SymMat& x, double tol);
inline bool is_psd(const SymMat& x) { return is_psd(x, 1e-10); }

// x <= y in the cone order, up to tolerance on y - x.
inline bool cone_leq(const SymMat& x, const SymMat& y, double tol = 1e-10) {
    return is_psd(y - x, tol);
}

// O diag(sqrt(max(lambda,0))) O^T; rejects inputs with an eigenvalue below
// -tol_default(x).
SymMat sqrt_psd(const SymMat& x);

// Eigenvalue clamp onto the cone: the nearest PSD matrix in Frobenius norm.
SymMat project_psd(const SymMat& x);
// Same, also reporting the clamped negative mass sum(|lambda_i^-|).
SymMat project_psd(const SymMat& x, double* clamped_mass);

// Generators of N(x) = {u PSD : <u,x> = 0}: the PSD basis elements
// O e^{ab} O^T supported on the numerical null space of x (eigenvalues
// <= rank_tol * lambda_max). Empty for numerically definite x.
std::vector<SymMat> normal_cone_basis(const SymMat& x, double rank_tol = 1e-10);

// Determinant derivatives in the unrestricted-entry convention (all d^2
// entries independent). Gradient is the adjugate, exact for any y; the mixed
// pair derivative d^2 det / dx_ij dx_ji equals minus the complementary minor
// with rows/columns {i,j} deleted, and vanishes for i == j.
SymMat det_gradient(const SymMat& y);
double det_second_pair(const SymMat& y, int i, int j);

// g x g^T for general g (result symmetrized).
SymMat congruence(const Mat& g, const SymMat& x);

// x * m and m * x as general matrices.
Mat sym_mul(const SymMat& x, const Mat& m);
Mat sym_mul(const Mat& m, const SymMat& x);
// x * y * x for symmetric x, y.
SymMat sandwich(const SymMat& x, const SymMat& y);

}  // namespace affine
