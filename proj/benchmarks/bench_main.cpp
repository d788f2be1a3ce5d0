#include <benchmark/benchmark.h>

#include <random>
#include <set>
#include <utility>

#include "mrws/least_gradient.hpp"
#include "mrws/nonlocal_calculus.hpp"
#include "mrws/plap.hpp"
#include "mrws/rws_core.hpp"

namespace {

using namespace mrws;

/// Random connected weighted graph: a spanning path plus extra random edges.
RandomWalkSpace random_graph(int n, std::mt19937_64& rng) {
    StateSpace sp;
    sp.n = n;
    for (int i = 0; i < n; ++i) sp.labels.push_back("s" + std::to_string(i));
    std::uniform_real_distribution<double> wdist(0.2, 2.0);
    std::uniform_int_distribution<int> vdist(0, n - 1);
    std::vector<WeightTriple> w;
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i + 1 < n; ++i) {
        w.push_back({i, i + 1, wdist(rng)});
        seen.emplace(i, i + 1);
    }
    for (int e = 0; e < n; ++e) {
        int a = vdist(rng), b = vdist(rng);
        if (a != b && seen.emplace(std::min(a, b), std::max(a, b)).second)
            w.push_back({a, b, wdist(rng)});
    }
    return build_from_symmetric_weights(std::move(sp), w);
}

DomainProblem random_problem(int n, std::mt19937_64& rng) {
    RandomWalkSpace rws = random_graph(n, rng);
    std::vector<int> omega;
    for (int i = 0; i < n; ++i)
        if (i % 4 != 0) omega.push_back(i);
    auto br = m_boundary(rws, omega);
    BoundaryData psi;
    std::uniform_real_distribution<double> pdist(-1.0, 1.0);
    for (int b : br.decomp.boundary) psi.emplace_back(b, pdist(rng));
    return make_problem(std::move(rws), std::move(omega), std::move(psi));
}

void bm_total_variation(benchmark::State& state) {
    std::mt19937_64 rng(7);
    RandomWalkSpace rws = random_graph(static_cast<int>(state.range(0)), rng);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField u(rws.n());
    for (double& v : u) v = dist(rng);
    for (auto _ : state) benchmark::DoNotOptimize(total_variation(rws, u));
}
BENCHMARK(bm_total_variation)->Arg(50)->Arg(200)->Arg(1000);

void bm_solve_exact(benchmark::State& state) {
    std::mt19937_64 rng(11);
    DomainProblem problem = random_problem(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(solve_exact(problem).energy);
}
BENCHMARK(bm_solve_exact)->Arg(30)->Arg(100)->Arg(300);

void bm_solve_p(benchmark::State& state) {
    std::mt19937_64 rng(13);
    DomainProblem problem = random_problem(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(solve_p(problem, 1.5));
}
BENCHMARK(bm_solve_p)->Arg(30)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
