#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "affine/laplace.hpp"
#include "affine/sampling.hpp"

using namespace affine;

TEST_CASE("laplace transform at t = 0 and u = 0") {
    const AffineParams p = make_wishart_params(2, 2.0);
    CounterRng rng(61, 0, 0, CounterRng::kGeneric);
    const SymMat x0 = random_psd(rng, 2, 2.0);
    const SymMat u = random_psd(rng, 2);
    CHECK(laplace_transform(p, x0, u, 0.0) ==
          doctest::Approx(std::exp(-inner(u, x0))).epsilon(1e-15));
    CHECK(laplace_transform(p, x0, SymMat(2), 0.8) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("laplace transform matches the wishart closed form") {
    const AffineParams p = make_wishart_params(2, 2.0);
    const SymMat eye = SymMat::identity(2);
    // (1/9) e^{-2/3}
    CHECK(laplace_transform(p, eye, eye, 1.0) ==
          doctest::Approx(std::exp(-std::log(9.0) - 2.0 / 3.0)).epsilon(1e-8));
    // value lies in (0, 1]
    const double v = laplace_transform(p, eye, eye, 0.3);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
}

TEST_CASE("laplace transform is stable under grid refinement") {
    const AffineParams p = make_wishart_params(2, 2.0);
    const SymMat eye = SymMat::identity(2);
    RiccatiOptions coarse;
    coarse.grid = 8;
    RiccatiOptions fine;
    fine.grid = 256;
    const double a = laplace_transform(p, eye, eye, 1.7, coarse);
    const double b = laplace_transform(p, eye, eye, 1.7, fine);
    CHECK(std::abs(a - b) <= 1e-7);
}

TEST_CASE("generator on exponentials") {
    const AffineParams p = make_wishart_params(2, 2.0);
    const SymMat eye = SymMat::identity(2);
    // u = 0 conservative: A 1 = 0
    CHECK(generator_on_exponential(p, SymMat(2), eye) == 0.0);
    // F(I) = 4 and <R(I), I> = -4 cancel
    CHECK(generator_on_exponential(p, eye, eye) == doctest::Approx(0.0).epsilon(1e-14));

    // one-sided finite difference of the Laplace transform at t = 0+
    // (second-order forward stencil, so the step-1e-4 truncation error stays
    // beneath the 1e-5 tolerance)
    CounterRng rng(62, 0, 0, CounterRng::kGeneric);
    const SymMat x0 = random_psd(rng, 2);
    const SymMat u = random_psd(rng, 2) + SymMat::identity(2) * 0.2;
    const double h = 1e-4;
    RiccatiOptions tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    const double f0 = laplace_transform(p, x0, u, 0.0, tight);
    const double f1 = laplace_transform(p, x0, u, h, tight);
    const double f2 = laplace_transform(p, x0, u, 2.0 * h, tight);
    const double fd = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
    CHECK(std::abs(generator_on_exponential(p, u, x0) - fd) <= 1e-5);
}

TEST_CASE("generator_apply on constants and exponentials") {
    AffineParams p = make_wishart_params(2, 2.0);
    p.c = 0.2;
    p.gamma = SymMat::diag({0.3, 0.1});
    CounterRng rng(63, 0, 0, CounterRng::kGeneric);
    const SymMat x = random_psd(rng, 2, 2.0);

    // constants: only the killing term survives
    const double af = generator_apply(p, [](const SymMat&) { return 2.5; }, x);
    CHECK(af == doctest::Approx(-(p.c + inner(p.gamma, x)) * 2.5).epsilon(1e-8));

    // exponential: agree with the exact formula
    p = make_wishart_params(2, 2.0);
    const SymMat u = SymMat::identity(2);
    const double fd = generator_apply(
        p, [&](const SymMat& y) { return std::exp(-inner(u, y)); }, x, 1e-4);
    CHECK(std::abs(fd - generator_on_exponential(p, u, x)) <= 1e-6);
}

TEST_CASE("generator_apply on a quadratic against the hand expansion") {
    CounterRng rng(64, 0, 0, CounterRng::kGeneric);
    AffineParams p = make_wishart_params(2, 2.0);
    Mat h(2);
    h(0, 0) = 0.4;
    h(0, 1) = -0.2;
    h(1, 0) = 0.1;
    h(1, 1) = -0.3;
    p.drift = LinearDrift::from_h(h);
    const SymMat x = random_psd(rng, 2, 2.0);

    // f(x) = x11^2: A f = A_1111(x) + 2 x11 (b + B(x))_11
    const double got = generator_apply(p, [](const SymMat& y) { return y(0, 0) * y(0, 0); }, x);
    const double expect = diffusion_symbol(x, p.alpha, 0, 0, 0, 0) +
                          2.0 * x(0, 0) * (p.b + p.drift.apply(x))(0, 0);
    CHECK(got == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("generator_apply covers jump terms") {
    AffineParams p;
    p.dim = 2;
    p.alpha = SymMat(2);
    p.b = SymMat(2);
    p.drift = LinearDrift::zero(2);
    p.gamma = SymMat(2);
    p.m = ScalarAtomMeasure({{SymMat::identity(2) * 2.0, 0.7}});
    std::vector<MatrixAtom> atoms{{SymMat::diag({0.5, 0.0}), SymMat::identity(2)}};
    p.mu = MatrixAtomMeasure(atoms);

    CounterRng rng(65, 0, 0, CounterRng::kGeneric);
    const SymMat x = random_psd(rng, 2, 2.0);
    const SymMat u = SymMat::identity(2) * 0.4;
    const double got = generator_apply(
        p, [&](const SymMat& y) { return std::exp(-inner(u, y)); }, x, 1e-4);
    CHECK(std::abs(got - generator_on_exponential(p, u, x)) <= 1e-6);
}

TEST_CASE("quadratic form identity of the diffusion symbol") {
    CounterRng rng(66, 0, 0, CounterRng::kGeneric);
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 2 + rep % 2;
        const SymMat x = random_psd(rng, d, 2.0);
        const SymMat alpha = random_psd(rng, d);
        SymMat u(d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) u.set(i, j, rng.normal());
        double quad = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l)
                        quad += 0.5 * diffusion_symbol(x, alpha, i, j, k, l) * u(i, j) * u(k, l);
        const SymMat uau = SymMat::from_mat(u.to_mat() * alpha.to_mat() * u.to_mat());
        CHECK(quad == doctest::Approx(2.0 * inner(x, uau)).epsilon(1e-10));
    }
}
