#include "affine/sampling.hpp"

#include <cmath>

namespace affine {

Mat random_orthogonal(CounterRng& rng, int d) {
    Mat g(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    // Modified Gram-Schmidt on columns.
    for (int c = 0; c < d; ++c) {
        for (int p = 0; p < c; ++p) {
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += g(i, p) * g(i, c);
            for (int i = 0; i < d; ++i) g(i, c) -= dot * g(i, p);
        }
        double nrm = 0.0;
        for (int i = 0; i < d; ++i) nrm += g(i, c) * g(i, c);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) {
            // Degenerate draw; replace by a unit vector and restart the column.
            for (int i = 0; i < d; ++i) g(i, c) = (i == c) ? 1.0 : 0.0;
            c = c - 1;
            continue;
        }
        for (int i = 0; i < d; ++i) g(i, c) /= nrm;
    }
    return g;
}

SymMat random_psd(CounterRng& rng, int d, double scale) {
    const Mat o = random_orthogonal(rng, d);
    SymMat x(d);
    for (int k = 0; k < d; ++k) {
        const double lam = scale * rng.uniform();
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) x.add(i, j, lam * o(i, k) * o(j, k));
    }
    return x;
}

SymMat random_boundary_point(CounterRng& rng, int d, int rank, double scale) {
    const Mat o = random_orthogonal(rng, d);
    SymMat x(d);
    for (int k = 0; k < rank; ++k) {
        const double lam = scale * (0.1 + 0.9 * rng.uniform());
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) x.add(i, j, lam * o(i, k) * o(j, k));
    }
    return x;
}

}  // namespace affine
