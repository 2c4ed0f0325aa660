#include "affine/jumps.hpp"

#include <algorithm>
#include <stdexcept>

namespace affine {

SymMat chi(const SymMat& xi) {
    if (xi.frobenius_norm() <= 1.0) return xi;
    return SymMat(xi.dim());
}

namespace {

void check_atom_support(const SymMat& xi, const char* what) {
    if (!xi.all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite atom");
    if (xi.frobenius_norm() == 0.0) throw std::invalid_argument(std::string(what) + ": atom at zero");
    if (!is_psd(xi, 0.0)) throw std::invalid_argument(std::string(what) + ": atom outside the cone");
}

}  // namespace

ScalarAtomMeasure::ScalarAtomMeasure(std::vector<ScalarAtom> atoms) : atoms_(std::move(atoms)) {
    for (const ScalarAtom& a : atoms_) {
        check_atom_support(a.xi, "ScalarAtomMeasure");
        if (!(a.weight > 0.0)) throw std::invalid_argument("ScalarAtomMeasure: weight must be positive");
        if (a.xi.dim() != atoms_[0].xi.dim())
            throw std::invalid_argument("ScalarAtomMeasure: dimension mismatch");
    }
}

double ScalarAtomMeasure::total_weight() const {
    double s = 0.0;
    for (const ScalarAtom& a : atoms_) s += a.weight;
    return s;
}

MatrixAtomMeasure::MatrixAtomMeasure(std::vector<MatrixAtom> atoms) : atoms_(std::move(atoms)) {
    for (const MatrixAtom& a : atoms_) {
        check_atom_support(a.xi, "MatrixAtomMeasure");
        if (!a.weight.all_finite() || !is_psd(a.weight, 0.0))
            throw std::invalid_argument("MatrixAtomMeasure: weight must be PSD");
        if (a.xi.dim() != atoms_[0].xi.dim() || a.weight.dim() != a.xi.dim())
            throw std::invalid_argument("MatrixAtomMeasure: dimension mismatch");
    }
}

std::vector<double> kernel_intensity(const MatrixAtomMeasure& mu, const SymMat& x) {
    std::vector<double> lam;
    lam.reserve(mu.atoms().size());
    for (const MatrixAtom& a : mu.atoms()) {
        if (a.xi.dim() != x.dim()) throw std::invalid_argument("kernel_intensity: dimension mismatch");
        const double n2 = a.xi.frobenius_norm();
        const double denom = std::min(n2 * n2, 1.0);
        lam.push_back(std::max(inner(x, a.weight), 0.0) / denom);
    }
    return lam;
}

SymMat compensator_drift(const MatrixAtomMeasure& mu, const SymMat& x) {
    SymMat drift(x.dim());
    const std::vector<double> lam = kernel_intensity(mu, x);
    for (size_t k = 0; k < lam.size(); ++k) {
        if (lam[k] == 0.0) continue;
        drift += chi(mu.atoms()[k].xi) * lam[k];
    }
    return drift;
}

SymMat compensator_drift_linear(const MatrixAtomMeasure& mu, const SymMat& x) {
    SymMat drift(x.dim());
    for (const MatrixAtom& a : mu.atoms()) {
        const double n = a.xi.frobenius_norm();
        const double lam = inner(x, a.weight) / std::min(n * n, 1.0);
        if (lam == 0.0) continue;
        drift += chi(a.xi) * lam;
    }
    return drift;
}

}  // namespace affine
