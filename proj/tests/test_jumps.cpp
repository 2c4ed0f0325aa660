#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "affine/jumps.hpp"
#include "affine/rng.hpp"
#include "affine/sampling.hpp"

using namespace affine;

TEST_CASE("chi truncation") {
    const SymMat half = SymMat::identity(2) * 0.5;  // norm 0.707
    CHECK((chi(half) - half).frobenius_norm() == 0.0);
    CHECK(chi(SymMat::identity(2)).frobenius_norm() == 0.0);  // norm 1.414
    // Atom exactly on the unit sphere belongs to the truncated side.
    const SymMat unit = SymMat::diag({1.0, 0.0});
    CHECK((chi(unit) - unit).frobenius_norm() == 0.0);
    // Idempotent on its image.
    CounterRng rng(31, 0, 0, CounterRng::kGeneric);
    for (int rep = 0; rep < 10; ++rep) {
        const SymMat x = random_psd(rng, 2, 2.0);
        const SymMat c1 = chi(x);
        CHECK((chi(c1) - c1).frobenius_norm() == 0.0);
    }
}

TEST_CASE("measure construction rejects invalid atoms") {
    CHECK_THROWS_AS(ScalarAtomMeasure({{SymMat(2), 1.0}}), std::invalid_argument);  // zero atom
    CHECK_THROWS_AS(ScalarAtomMeasure({{SymMat::identity(2), -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(ScalarAtomMeasure({{SymMat::diag({1.0, -1.0}), 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(MatrixAtomMeasure({{SymMat::identity(2), SymMat::diag({1.0, -1.0})}}),
                    std::invalid_argument);
}

TEST_CASE("kernel intensity") {
    const MatrixAtomMeasure mu({{SymMat::identity(2), SymMat::identity(2)}});

    // x = 0: linearity forces zero.
    CHECK(kernel_intensity(mu, SymMat(2)) == std::vector<double>{0.0});

    // ||I_2||^2 = 2 > 1, so the denominator saturates at 1 and
    // lambda = <I, I> = 2.
    const auto lam = kernel_intensity(mu, SymMat::identity(2));
    REQUIRE(lam.size() == 1);
    CHECK(lam[0] == doctest::Approx(2.0).epsilon(1e-15));

    // Linearity in x.
    CounterRng rng(32, 0, 0, CounterRng::kGeneric);
    for (int rep = 0; rep < 10; ++rep) {
        const SymMat x = random_psd(rng, 2);
        const auto l1 = kernel_intensity(mu, x);
        const auto l2 = kernel_intensity(mu, x * 2.0);
        CHECK(l2[0] == doctest::Approx(2.0 * l1[0]).epsilon(1e-12));
    }

    CHECK_THROWS_AS(kernel_intensity(mu, SymMat::identity(3)), std::invalid_argument);
}

TEST_CASE("kernel intensities are nonnegative on the cone") {
    CounterRng rng(33, 0, 0, CounterRng::kGeneric);
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 2 + rep % 3;
        const MatrixAtomMeasure mu({{random_psd(rng, d, 2.0) + SymMat::identity(d) * 0.1,
                                     random_psd(rng, d)}});
        const SymMat x = random_psd(rng, d, 3.0);
        for (double l : kernel_intensity(mu, x)) CHECK(l >= 0.0);
    }
}

TEST_CASE("compensator drift") {
    // All atoms outside the unit ball: chi vanishes.
    const MatrixAtomMeasure big({{SymMat::identity(2) * 2.0, SymMat::identity(2)}});
    CHECK(compensator_drift(big, SymMat::identity(2)).frobenius_norm() == 0.0);

    // x = 0.
    const MatrixAtomMeasure small({{SymMat::diag({0.5, 0.0}), SymMat::identity(2)}});
    CHECK(compensator_drift(small, SymMat(2)).frobenius_norm() == 0.0);

    // Brute-force sum over atoms on random instances.
    CounterRng rng(34, 0, 0, CounterRng::kGeneric);
    for (int rep = 0; rep < 15; ++rep) {
        const int d = 2;
        std::vector<MatrixAtom> atoms;
        for (int k = 0; k < 3; ++k)
            atoms.push_back({random_psd(rng, d, 1.5) + SymMat::identity(d) * 0.05,
                             random_psd(rng, d)});
        const MatrixAtomMeasure mu(atoms);
        const SymMat x = random_psd(rng, d, 2.0);
        SymMat expect(d);
        for (const MatrixAtom& a : atoms) {
            const double n = a.xi.frobenius_norm();
            expect += chi(a.xi) * (inner(x, a.weight) / std::min(n * n, 1.0));
        }
        CHECK((compensator_drift(mu, x) - expect).frobenius_norm() <=
              1e-12 * (1.0 + expect.frobenius_norm()));
    }
}

TEST_CASE("truncated compensator terms stay finite and nonnegative on complementary pairs") {
    CounterRng rng(35, 0, 0, CounterRng::kGeneric);
    for (int rep = 0; rep < 15; ++rep) {
        const int d = 3;
        const SymMat x = random_boundary_point(rng, d, 1 + rep % 2);
        std::vector<MatrixAtom> atoms;
        for (int k = 0; k < 2; ++k)
            atoms.push_back({random_psd(rng, d, 1.2) + SymMat::identity(d) * 0.05,
                             random_psd(rng, d)});
        const MatrixAtomMeasure mu(atoms);
        const auto lam = kernel_intensity(mu, x);
        for (const SymMat& u : normal_cone_basis(x)) {
            double total = 0.0;
            for (size_t k = 0; k < atoms.size(); ++k) {
                const double term = inner(chi(atoms[k].xi), u) * lam[k];
                CHECK(term >= -1e-10);
                total += term;
            }
            CHECK(std::isfinite(total));
        }
    }
}
