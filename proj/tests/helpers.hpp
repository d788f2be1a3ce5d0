#pragma once

#include <random>

#include "mrws/least_gradient.hpp"
#include "mrws/rws_core.hpp"

namespace mrws::testutil {

inline StateSpace named_states(std::initializer_list<const char*> names) {
    StateSpace sp;
    for (const char* n : names) sp.labels.emplace_back(n);
    sp.n = static_cast<int>(sp.labels.size());
    return sp;
}

/// Path a - b - c with unit weights: nu = (1, 2, 1).
inline RandomWalkSpace p3_space() {
    return build_from_symmetric_weights(named_states({"a", "b", "c"}),
                                        {{0, 1, 1.0}, {1, 2, 1.0}});
}

/// The path problem: Omega = {b}, psi(a) = 0, psi(c) = 1.
inline DomainProblem p3_problem() {
    return make_problem(p3_space(), {1}, {{0, 0.0}, {2, 1.0}});
}

/// 4-cycle a - b - c - d with unit weights, Omega = {b, d}, psi(a) = 0,
/// psi(c) = 1.
inline DomainProblem cycle4_problem() {
    auto rws = build_from_symmetric_weights(named_states({"a", "b", "c", "d"}),
                                            {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
    return make_problem(std::move(rws), {1, 3}, {{0, 0.0}, {2, 1.0}});
}

/// Connected random weighted graph (spanning path plus extra edges); always
/// reversible by construction.
inline RandomWalkSpace random_graph(int n, std::mt19937_64& rng, double extra_edge_factor = 1.0) {
    StateSpace sp;
    sp.n = n;
    for (int i = 0; i < n; ++i) sp.labels.push_back("s" + std::to_string(i));
    std::uniform_real_distribution<double> wdist(0.1, 2.0);
    std::uniform_int_distribution<int> vdist(0, n - 1);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (int i = 0; i + 1 < n; ++i) dense[i][i + 1] = wdist(rng);
    int extra = static_cast<int>(extra_edge_factor * n);
    for (int e = 0; e < extra; ++e) {
        int a = vdist(rng), b = vdist(rng);
        if (a != b) dense[std::min(a, b)][std::max(a, b)] = wdist(rng);
    }
    std::vector<WeightTriple> w;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dense[i][j] > 0) w.push_back({i, j, dense[i][j]});
    return build_from_symmetric_weights(std::move(sp), w);
}

inline ScalarField random_field(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField u(n);
    for (double& v : u) v = dist(rng);
    return u;
}

/// Random Dirichlet problem on a connected graph: omega_size interior states,
/// boundary data in [-1, 1].
inline DomainProblem random_problem(int n, int omega_size, std::mt19937_64& rng) {
    RandomWalkSpace rws = random_graph(n, rng);
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> omega(all.begin(), all.begin() + omega_size);
    auto br = m_boundary(rws, sorted_unique(omega));
    std::uniform_real_distribution<double> pdist(-1.0, 1.0);
    BoundaryData psi;
    for (int b : br.decomp.boundary) psi.emplace_back(b, pdist(rng));
    return make_problem(std::move(rws), br.decomp.omega, std::move(psi));
}

}  // namespace mrws::testutil
