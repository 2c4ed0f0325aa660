#pragma once

#include "affine/rng.hpp"
#include "affine/sym_mat.hpp"

namespace affine {

// Haar-distributed orthogonal matrix: Gaussian matrix, modified Gram-Schmidt,
// signs fixed by positive diagonal of R.
Mat random_orthogonal(CounterRng& rng, int d);

// Random PSD matrix O diag(lambda) O^T with eigenvalues uniform on
// (0, scale].
SymMat random_psd(CounterRng& rng, int d, double scale = 1.0);

// Random boundary point of prescribed positive rank.
SymMat random_boundary_point(CounterRng& rng, int d, int rank, double scale = 1.0);

}  // namespace affine
