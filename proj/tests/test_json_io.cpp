#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "affine/json_io.hpp"
#include "affine/sampling.hpp"

using namespace affine;

namespace {

AffineParams sample_params() {
    CounterRng rng(81, 0, 0, CounterRng::kGeneric);
    AffineParams p;
    p.dim = 2;
    p.alpha = random_psd(rng, 2);
    p.b = p.alpha + random_psd(rng, 2, 0.5);
    Mat h(2);
    h(0, 0) = 1.0 / 3.0;  // exercise non-terminating binary fractions
    h(0, 1) = -0.123456789012345678;
    h(1, 1) = 0.25;
    p.drift = LinearDrift::from_h(h);
    p.c = 0.1;
    p.gamma = random_psd(rng, 2, 0.2);
    p.m = ScalarAtomMeasure({{random_psd(rng, 2) + SymMat::identity(2) * 0.1, 0.7}});
    std::vector<MatrixAtom> atoms{{random_psd(rng, 2) + SymMat::identity(2) * 0.1,
                                   random_psd(rng, 2)}};
    p.mu = MatrixAtomMeasure(atoms);
    return p;
}

}  // namespace

TEST_CASE("symmat json round trip is bit exact") {
    CounterRng rng(82, 0, 0, CounterRng::kGeneric);
    for (int rep = 0; rep < 20; ++rep) {
        SymMat x(3);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) x.set(i, j, rng.normal() / 3.0);
        const Json j = to_json(x);
        const SymMat back = symmat_from_json(Json::parse(j.dump()));
        for (size_t k = 0; k < x.packed_size(); ++k) CHECK(back.packed()[k] == x.packed()[k]);
    }
}

TEST_CASE("symmat json layout matches the schema") {
    SymMat x(2);
    x.set(0, 0, 1.0);
    x.set(0, 1, 2.0);
    x.set(1, 1, 3.0);
    const Json j = to_json(x);
    CHECK(j["dim"] == 2);
    CHECK(j["upper"] == Json::array({1.0, 2.0, 3.0}));
    CHECK_THROWS_AS(symmat_from_json(Json::parse(R"({"dim": 2, "upper": [1, 2]})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(symmat_from_json(Json::parse(R"({"dim": 2})")), std::invalid_argument);
}

TEST_CASE("params json round trip is bit exact") {
    const AffineParams p = sample_params();
    const Json j = to_json(p);
    const AffineParams q = params_from_json(Json::parse(j.dump()));
    CHECK(q.dim == p.dim);
    CHECK((q.alpha - p.alpha).frobenius_norm() == 0.0);
    CHECK((q.b - p.b).frobenius_norm() == 0.0);
    CHECK(q.c == p.c);
    CHECK((q.gamma - p.gamma).frobenius_norm() == 0.0);
    for (int i = 0; i < 2; ++i)
        for (int jj = i; jj < 2; ++jj)
            CHECK((q.drift.beta(i, jj) - p.drift.beta(i, jj)).frobenius_norm() == 0.0);
    REQUIRE(q.m.atoms().size() == 1);
    CHECK(q.m.atoms()[0].weight == p.m.atoms()[0].weight);
    CHECK((q.m.atoms()[0].xi - p.m.atoms()[0].xi).frobenius_norm() == 0.0);
    REQUIRE(q.mu.atoms().size() == 1);
    CHECK((q.mu.atoms()[0].weight - p.mu.atoms()[0].weight).frobenius_norm() == 0.0);

    // serialize -> parse -> serialize is textually stable
    CHECK(to_json(q).dump() == j.dump());
}

TEST_CASE("params reader flags malformed input") {
    CHECK_THROWS_AS(params_from_json(Json::parse(R"({"dim": 0})")), std::invalid_argument);
    CHECK_THROWS_AS(params_from_json(Json::parse(R"({"dim": 2, "alpha": 3})")),
                    std::invalid_argument);
    // beta index out of range
    Json j = to_json(sample_params());
    j["beta"][0][0] = 5;
    CHECK_THROWS_AS(params_from_json(j), std::invalid_argument);
    // dimension mismatch between fields
    Json k = to_json(sample_params());
    k["alpha"] = to_json(SymMat::identity(3));
    CHECK_THROWS_AS(params_from_json(k), std::invalid_argument);
}

TEST_CASE("file io and digest") {
    const AffineParams p = sample_params();
    const std::string path = "test_params_roundtrip.json";
    save_json_file(path, to_json(p));
    const AffineParams q = load_params_file(path);
    CHECK(to_json(q).dump() == to_json(p).dump());
    const std::string d1 = file_digest(path);
    CHECK(!d1.empty());
    save_json_file(path, to_json(q));
    CHECK(file_digest(path) == d1);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_json_file("does_not_exist.json"), std::invalid_argument);
}

TEST_CASE("malformed json file reports input error") {
    const std::string path = "test_malformed.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_json_file(path), std::invalid_argument);
    std::remove(path.c_str());
}
