#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mrws/nonlocal_calculus.hpp"
#include "mrws/rws_core.hpp"

using namespace mrws;
using namespace mrws::testutil;

TEST_CASE("graph builder: path a-b-c with unit weights") {
    RandomWalkSpace rws = p3_space();
    CHECK(rws.nu(0) == 1.0);
    CHECK(rws.nu(1) == 2.0);
    CHECK(rws.nu(2) == 1.0);
    CHECK(rws.walk.prob(1, 0) == 0.5);
    CHECK(rws.walk.prob(1, 2) == 0.5);
    CHECK(rws.walk.prob(0, 1) == 1.0);
    CHECK(rws.flags.reversibility_ok == Tri::True);
    CHECK(rws.flags.invariance_ok == Tri::True);
    CHECK(rws.flags.reversibility_residual == 0.0);
}

TEST_CASE("graph builder: single weighted edge") {
    auto rws = build_from_symmetric_weights(named_states({"a", "b"}), {{0, 1, 2.5}});
    CHECK(rws.nu(0) == 2.5);
    CHECK(rws.nu(1) == 2.5);
    CHECK(rws.walk.prob(0, 1) == 1.0);
    CHECK(rws.walk.prob(1, 0) == 1.0);
}

TEST_CASE("graph builder: isolated vertex rejected") {
    CHECK_THROWS_AS(build_from_symmetric_weights(named_states({"a", "b", "c"}), {{0, 1, 1.0}}),
                    IsolatedState);
}

TEST_CASE("graph builder: conflicting duplicate weights rejected") {
    CHECK_THROWS_AS(
        build_from_symmetric_weights(named_states({"a", "b"}), {{0, 1, 1.0}, {1, 0, 2.0}}),
        AsymmetricWeights);
}

TEST_CASE("markov builder: two-state swap") {
    auto rws = build_from_markov_kernel(named_states({"a", "b"}), {{{1, 1.0}}, {{0, 1.0}}});
    CHECK(rws.nu(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rws.nu(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rws.flags.reversibility_ok == Tri::True);
}

TEST_CASE("markov builder: directed 3-cycle is invariant but not reversible") {
    auto rws = build_from_markov_kernel(named_states({"0", "1", "2"}),
                                        {{{1, 1.0}}, {{2, 1.0}}, {{0, 1.0}}});
    CHECK(rws.nu(0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(rws.flags.invariance_ok == Tri::True);
    CHECK(rws.flags.reversibility_ok == Tri::False);
    auto rep = validate_reversibility(rws);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_residual == doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("markov builder: non-stochastic row rejected") {
    CHECK_THROWS_AS(
        build_from_markov_kernel(named_states({"a", "b"}), {{{1, 0.9}}, {{0, 1.0}}}),
        NotStochastic);
}

namespace {
StateSpace collinear3() {
    StateSpace sp = named_states({"p0", "p1", "p2"});
    sp.metric = std::vector<double>{0, 1, 2, 1, 0, 1, 2, 1, 0};
    return sp;
}
}  // namespace

TEST_CASE("epsilon-step walk on three collinear points") {
    Measure mu{{1.0, 1.0, 1.0}};
    auto rws = build_epsilon_step(collinear3(), mu, 1.5);
    CHECK(rws.walk.prob(0, 0) == 0.5);
    CHECK(rws.walk.prob(0, 1) == 0.5);
    CHECK(rws.walk.prob(0, 2) == 0.0);
    CHECK(rws.walk.prob(1, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    // nu(0) m_0(1) = 1/2 but nu(1) m_1(0) = 1/3: flagged non-reversible
    CHECK(rws.flags.reversibility_ok == Tri::False);
}

TEST_CASE("epsilon-step walk with a ball larger than the diameter") {
    Measure mu{{1.0, 2.0, 1.0}};
    auto rws = build_epsilon_step(collinear3(), mu, 10.0);
    for (int x = 0; x < 3; ++x) {
        CHECK(rws.walk.prob(x, 0) == 0.25);
        CHECK(rws.walk.prob(x, 1) == 0.5);
        CHECK(rws.walk.prob(x, 2) == 0.25);
    }
    CHECK(rws.flags.reversibility_ok == Tri::True);
}

TEST_CASE("epsilon-step walk with tiny radius is the lazy identity") {
    Measure mu{{1.0, 1.0, 1.0}};
    auto rws = build_epsilon_step(collinear3(), mu, 0.5);
    for (int x = 0; x < 3; ++x) CHECK(rws.walk.prob(x, x) == 1.0);
}

TEST_CASE("epsilon-step walk without a metric is rejected") {
    Measure mu{{1.0, 1.0}};
    CHECK_THROWS_AS(build_epsilon_step(named_states({"a", "b"}), mu, 1.0), MissingMetric);
}

TEST_CASE("annulus-step walk on the integer segment") {
    StateSpace sp = named_states({"0", "1", "2", "3"});
    sp.metric = std::vector<double>{0, 1, 2, 3, 1, 0, 1, 2, 2, 1, 0, 1, 3, 2, 1, 0};
    Measure mu{{1.0, 1.0, 1.0, 1.0}};
    auto rws = build_annulus_step(sp, mu, 1.5, 0.5);
    CHECK(rws.walk.prob(1, 0) == 0.5);
    CHECK(rws.walk.prob(1, 2) == 0.5);
    CHECK(rws.walk.prob(1, 1) == 0.0);
    CHECK(rws.walk.prob(0, 1) == 1.0);
}

TEST_CASE("annulus-step walk: degenerate radii and empty annuli rejected") {
    StateSpace sp = collinear3();
    Measure mu{{1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(build_annulus_step(sp, mu, 0.5, 0.5), Error);
    CHECK_THROWS_AS(build_annulus_step(collinear3(), mu, 0.5, 0.1), EmptyAnnulus);
}

TEST_CASE("restrict_to_domain folds leaked mass into a self-atom") {
    auto rws = restrict_to_domain(p3_space(), {0, 1});
    CHECK(rws.n() == 2);
    CHECK(rws.walk.prob(0, 1) == 1.0);
    CHECK(rws.walk.prob(1, 0) == 0.5);
    CHECK(rws.walk.prob(1, 1) == 0.5);
    CHECK(rws.nu(1) == 2.0);
}

TEST_CASE("restrict_to_domain: full domain is a no-op, empty rejected") {
    auto rws = restrict_to_domain(p3_space(), {0, 1, 2});
    CHECK(rws.walk.prob(1, 0) == 0.5);
    CHECK(rws.walk.prob(1, 1) == 0.0);
    CHECK_THROWS_AS(restrict_to_domain(p3_space(), {}), EmptyDomain);
}

TEST_CASE("validate_invariance flags a perturbed kernel") {
    auto rws = p3_space();
    CHECK(validate_invariance(rws).max_residual <= 1e-12);
    rws.walk.rows[1][0].p += 1e-3;
    rws.walk.rows[1][1].p -= 1e-3;
    auto rep = validate_invariance(rws, 1e-6);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_residual > 1e-6);
}

TEST_CASE("is_ergodic verdicts") {
    CHECK(is_ergodic(p3_space()).ergodic);

    auto two_edges = build_from_symmetric_weights(named_states({"a", "b", "c", "d"}),
                                                  {{0, 1, 1.0}, {2, 3, 1.0}});
    auto res = is_ergodic(two_edges);
    CHECK_FALSE(res.ergodic);
    CHECK(res.part_a.size() + res.part_b.size() == 4);
    CHECK(interaction(two_edges, res.part_a, res.part_b) == 0.0);

    auto lazy = build_from_markov_kernel(named_states({"a", "b"}), {{{0, 1.0}}, {{1, 1.0}}},
                                         Measure{{0.5, 0.5}});
    CHECK_FALSE(is_ergodic(lazy).ergodic);
}

TEST_CASE("m_boundary on the path and on the whole space") {
    auto rws = p3_space();
    auto br = m_boundary(rws, {1});
    CHECK(br.decomp.boundary == std::vector<int>{0, 2});
    CHECK(br.decomp.omega_m == std::vector<int>{0, 1, 2});
    CHECK_FALSE(br.zero_boundary_mass_warning);

    auto all = m_boundary(rws, {0, 1, 2});
    CHECK(all.decomp.boundary.empty());
    CHECK(all.zero_boundary_mass_warning);
}

TEST_CASE("property: reversibility implies invariance on random graph spaces") {
    std::mt19937_64 rng(101);
    for (int t = 0; t < 200; ++t) {
        int n = 3 + static_cast<int>(rng() % 48);
        auto rws = random_graph(n, rng);
        REQUIRE(validate_reversibility(rws, 1e-10).pass);
        CHECK(validate_invariance(rws, 1e-10).pass);
    }
}

TEST_CASE("property: weight extraction round-trips graph-built spaces") {
    std::mt19937_64 rng(102);
    for (int t = 0; t < 20; ++t) {
        auto rws = random_graph(12, rng);
        auto rt = build_from_symmetric_weights(rws.space, extract_weights(rws));
        for (int x = 0; x < rws.n(); ++x) {
            CHECK(rt.nu(x) == doctest::Approx(rws.nu(x)).epsilon(1e-14));
            for (const auto& e : rws.walk.rows[x])
                CHECK(rt.walk.prob(x, e.to) == doctest::Approx(e.p).epsilon(1e-14));
        }
    }
}

TEST_CASE("property: restriction preserves detailed balance") {
    std::mt19937_64 rng(103);
    for (int t = 0; t < 50; ++t) {
        auto rws = random_graph(10, rng);
        std::vector<int> omega;
        for (int i = 0; i < 10; ++i)
            if (rng() % 2) omega.push_back(i);
        if (omega.empty()) omega.push_back(0);
        auto sub = restrict_to_domain(rws, omega);
        CHECK(validate_reversibility(sub, 1e-12).pass);
    }
}

TEST_CASE("property: ergodicity is invariant under rescaling nu") {
    std::mt19937_64 rng(104);
    for (int t = 0; t < 20; ++t) {
        auto rws = random_graph(8, rng, 0.3);
        bool before = is_ergodic(rws).ergodic;
        for (double& w : rws.nu.weights) w *= 37.5;
        CHECK(is_ergodic(rws).ergodic == before);
    }
}
