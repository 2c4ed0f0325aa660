#pragma once

#include <functional>

#include "affine/riccati.hpp"

namespace affine {

struct TransformQuery {
    AffineParams params;
    SymMat x0;
    SymMat u;
    double t = 0.0;
};

// P_t e^{-<u, .>}(x0) = exp(-phi(t,u) - <psi(t,u), x0>), via the Riccati
// solver. Lies in (0, 1] for PSD inputs and a conservative parameter set.
double laplace_transform(const TransformQuery& q, const RiccatiOptions& opts = {});
double laplace_transform(const AffineParams& p, const SymMat& x0, const SymMat& u, double t,
                         const RiccatiOptions& opts = {});

// Generator on an exponential: A e^{-<u,x>} = (-F(u) - <R(u), x>) e^{-<u,x>},
// evaluated exactly.
double generator_on_exponential(const AffineParams& p, const SymMat& u, const SymMat& x);

// Full generator applied to a scalar function on the cone, with derivatives
// by central finite differences on the d(d+1)/2 free coordinates (symmetric
// extension convention) and jump integrals as exact sums. Verification tool,
// not a performance path.
double generator_apply(const AffineParams& p, const std::function<double(const SymMat&)>& f,
                       const SymMat& x, double fd_step = 0.0);

// Diffusion symbol A_ijkl(x) = x_ik a_jl + x_il a_jk + x_jk a_il + x_jl a_ik.
double diffusion_symbol(const SymMat& x, const SymMat& alpha, int i, int j, int k, int l);

}  // namespace affine
