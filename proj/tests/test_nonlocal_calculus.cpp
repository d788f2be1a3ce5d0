#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mrws/nonlocal_calculus.hpp"

using namespace mrws;
using namespace mrws::testutil;

TEST_CASE("interaction on the path") {
    auto rws = p3_space();
    CHECK(interaction(rws, {0}, {1}) == 1.0);
    CHECK(interaction(rws, {1}, {0}) == 1.0);
    CHECK(interaction(rws, {0}, {2}) == 0.0);
    CHECK(interaction(rws, {0, 1}, {2}) == 1.0);
}

TEST_CASE("perimeter on the path") {
    auto rws = p3_space();
    CHECK(perimeter(rws, {2}) == 1.0);
    CHECK(perimeter(rws, {1, 2}) == 1.0);
    CHECK(perimeter(rws, {1}) == 2.0);
    CHECK(perimeter(rws, {}) == 0.0);
    CHECK(perimeter(rws, {0, 1, 2}) == 0.0);
}

TEST_CASE("perimeter equals nu(E) minus the internal interaction") {
    std::mt19937_64 rng(201);
    for (int t = 0; t < 50; ++t) {
        auto rws = random_graph(9, rng);
        std::vector<int> e;
        for (int i = 0; i < 9; ++i)
            if (rng() % 2) e.push_back(i);
        double nu_e = 0;
        for (int x : e) nu_e += rws.nu(x);
        CHECK(perimeter(rws, e) ==
              doctest::Approx(nu_e - interaction(rws, e, e)).epsilon(1e-12));
        CHECK(perimeter(rws, e) ==
              doctest::Approx(perimeter(rws, complement(9, e))).epsilon(1e-12));
    }
}

TEST_CASE("total variation of the linear ramp on the path") {
    auto rws = p3_space();
    CHECK(total_variation(rws, {0.0, 0.5, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(total_variation(rws, {1.0, 1.0, 1.0}) == 0.0);
}

TEST_CASE("nonlocal gradient and divergence on the path") {
    auto rws = p3_space();
    ScalarField u{0.0, 0.5, 1.0};
    PairField g = nonlocal_gradient(rws, u);
    CHECK(g.get(rws.walk, 0, 1) == 0.5);
    CHECK(g.get(rws.walk, 1, 0) == -0.5);
    CHECK(g.get(rws.walk, 1, 2) == 0.5);

    ScalarField d = divergence(rws, g);
    CHECK(d[0] == 0.5);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == -0.5);

    // a symmetric pair field has zero divergence
    PairField z = PairField::zeros_like(rws.walk);
    for (auto& row : z.values)
        for (double& v : row) v = 0.7;
    for (double v : divergence(rws, z)) CHECK(v == 0.0);
}

TEST_CASE("gradient is linear") {
    std::mt19937_64 rng(202);
    auto rws = random_graph(7, rng);
    auto u = random_field(7, rng);
    auto v = random_field(7, rng);
    ScalarField w(7);
    for (int i = 0; i < 7; ++i) w[i] = 2.0 * u[i] - 3.0 * v[i];
    PairField gu = nonlocal_gradient(rws, u), gv = nonlocal_gradient(rws, v),
              gw = nonlocal_gradient(rws, w);
    for (int x = 0; x < 7; ++x)
        for (size_t k = 0; k < gw.values[x].size(); ++k)
            CHECK(gw.values[x][k] ==
                  doctest::Approx(2.0 * gu.values[x][k] - 3.0 * gv.values[x][k]).epsilon(1e-13));
}

TEST_CASE("Green's identity on random reversible spaces") {
    std::mt19937_64 rng(203);
    for (int t = 0; t < 50; ++t) {
        auto rws = random_graph(10, rng);
        auto u = random_field(10, rng);
        PairField z = PairField::zeros_like(rws.walk);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (auto& row : z.values)
            for (double& v : row) v = dist(rng);
        CHECK(greens_identity_residual(rws, u, z) <= 1e-10);
    }
}

TEST_CASE("Green's identity guards against non-reversible spaces") {
    auto rws = build_from_markov_kernel(named_states({"0", "1", "2"}),
                                        {{{1, 1.0}}, {{2, 1.0}}, {{0, 1.0}}});
    ScalarField u{0.0, 1.0, 2.0};
    PairField z = PairField::zeros_like(rws.walk);
    CHECK_THROWS_AS(greens_identity_residual(rws, u, z), NotReversible);
    CHECK_NOTHROW(greens_identity_residual(rws, u, z, true));
}

TEST_CASE("coarea formula: examples") {
    auto rws = p3_space();
    CHECK(coarea_integral(rws, {0.0, 0.5, 1.0}) ==
          doctest::Approx(total_variation(rws, {0.0, 0.5, 1.0})).epsilon(1e-14));
    // indicator: the layer-cake integral collapses to the perimeter
    CHECK(coarea_integral(rws, {0.0, 0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("coarea formula: property on random fields") {
    std::mt19937_64 rng(204);
    for (int t = 0; t < 100; ++t) {
        int n = 3 + static_cast<int>(rng() % 12);
        auto rws = random_graph(n, rng);
        auto u = random_field(n, rng, -2.0, 2.0);
        CHECK(coarea_integral(rws, u) == doctest::Approx(total_variation(rws, u)).epsilon(1e-11));
    }
}

TEST_CASE("TV of an indicator equals the perimeter") {
    std::mt19937_64 rng(205);
    for (int t = 0; t < 50; ++t) {
        auto rws = random_graph(8, rng);
        std::vector<int> e;
        ScalarField chi(8, 0.0);
        for (int i = 0; i < 8; ++i)
            if (rng() % 2) {
                e.push_back(i);
                chi[i] = 1.0;
            }
        CHECK(total_variation(rws, chi) == doctest::Approx(perimeter(rws, e)).epsilon(1e-12));
    }
}

TEST_CASE("TV convexity and scale equivariance") {
    std::mt19937_64 rng(206);
    auto rws = random_graph(9, rng);
    auto u = random_field(9, rng);
    auto v = random_field(9, rng);
    double tu = total_variation(rws, u), tv = total_variation(rws, v);
    for (double a : {0.25, 0.5, 0.75}) {
        ScalarField mix(9);
        for (int i = 0; i < 9; ++i) mix[i] = a * u[i] + (1 - a) * v[i];
        CHECK(total_variation(rws, mix) <= a * tu + (1 - a) * tv + 1e-12);
    }
    ScalarField su(9);
    for (int i = 0; i < 9; ++i) su[i] = -3.5 * u[i];
    CHECK(total_variation(rws, su) == doctest::Approx(3.5 * tu).epsilon(1e-12));
}

TEST_CASE("dual value matches TV: examples") {
    auto rws = p3_space();
    CHECK(tv_dual_value(rws, {0.0, 0.5, 1.0}) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(tv_dual_value(rws, {0.0, 1.0, 0.0}) ==
          doctest::Approx(total_variation(rws, {0.0, 1.0, 0.0})).epsilon(1e-8));
    CHECK(tv_dual_value(rws, {1.0, 1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("dual value matches TV beyond the brute-force regime") {
    std::mt19937_64 rng(207);
    for (int t = 0; t < 10; ++t) {
        auto rws = random_graph(12, rng);
        auto u = random_field(12, rng);
        double tv = total_variation(rws, u);
        CHECK(tv_dual_value(rws, u) == doctest::Approx(tv).epsilon(1e-6));
    }
}

TEST_CASE("dual value guards against non-reversible spaces") {
    auto rws = build_from_markov_kernel(named_states({"0", "1", "2"}),
                                        {{{1, 1.0}}, {{2, 1.0}}, {{0, 1.0}}});
    CHECK_THROWS_AS(tv_dual_value(rws, {0.0, 1.0, 2.0}), NotReversible);
}

TEST_CASE("restricted TV only counts pairs inside the set") {
    auto rws = p3_space();
    std::vector<int> sub{0, 1};
    // only the a-b pair contributes: 1/2 (1 * 1 * 1 + 2 * 1/2 * 1) = 1
    CHECK(total_variation(rws, {0.0, 1.0, 5.0}, &sub) == doctest::Approx(1.0).epsilon(1e-14));
}
