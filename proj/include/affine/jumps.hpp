#pragma once

#include <vector>

#include "affine/sym_mat.hpp"

namespace affine {

// Truncation of jump sizes, fixed once for the whole library:
// chi(xi) = xi if ||xi||_F <= 1, else 0. An atom exactly on the unit sphere
// counts as a small jump (closed ball). Parameter sets expressed with respect
// to a different truncation must be converted before ingestion.
SymMat chi(const SymMat& xi);

struct ScalarAtom {
    SymMat xi;      // jump size in the cone, nonzero
    double weight;  // > 0
};

struct MatrixAtom {
    SymMat xi;      // jump size in the cone, nonzero
    SymMat weight;  // PSD matrix weight
};

// Finite-atom constant jump measure m. With finitely many atoms every
// admissibility integral is an exact sum and the (||xi|| ^ 1)-moment is
// trivially finite, so construction only has to check atom validity.
class ScalarAtomMeasure {
public:
    ScalarAtomMeasure() = default;
    explicit ScalarAtomMeasure(std::vector<ScalarAtom> atoms);

    const std::vector<ScalarAtom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    int dim() const { return atoms_.empty() ? 0 : atoms_[0].xi.dim(); }
    double total_weight() const;

private:
    std::vector<ScalarAtom> atoms_;
};

// Finite-atom linear jump coefficient mu, with PSD matrix weights. The
// state-dependent kernel is M(x, .) with per-atom intensity
// <x, W_k> / (||xi_k||^2 ^ 1).
class MatrixAtomMeasure {
public:
    MatrixAtomMeasure() = default;
    explicit MatrixAtomMeasure(std::vector<MatrixAtom> atoms);

    const std::vector<MatrixAtom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    int dim() const { return atoms_.empty() ? 0 : atoms_[0].xi.dim(); }

private:
    std::vector<MatrixAtom> atoms_;
};

// Per-atom kernel intensities at state x, clamped at zero (self-duality of
// the cone makes them nonnegative; roundoff can leave -1e-12-level noise).
std::vector<double> kernel_intensity(const MatrixAtomMeasure& mu, const SymMat& x);

// Small-jump compensator contribution to the drift:
// sum_k chi(xi_k) * intensity_k(x), an exact finite sum.
SymMat compensator_drift(const MatrixAtomMeasure& mu, const SymMat& x);

// Same map without the intensity clamp, so it is linear on the whole of
// S_d; used when absorbing the compensator into a drift family.
SymMat compensator_drift_linear(const MatrixAtomMeasure& mu, const SymMat& x);

}  // namespace affine
