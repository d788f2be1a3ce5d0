#include "mrws/paper_examples.hpp"

#include <algorithm>
#include <cmath>

#include "mrws/rws_core.hpp"

namespace mrws {

GeneratedExample gen_markov_counterexample(int N) {
    if (N < 2) throw Error("markov counterexample needs N >= 2");

    GeneratedExample ex;
    ex.trunc.depth = N;
    ex.trunc.tail_bound = std::pow(4.0, -N) / 3.0;

    StateSpace sp;
    sp.n = N + 1;
    for (int n = 0; n <= N; ++n) sp.labels.push_back(std::to_string(n));

    RandomWalkSpace rws;
    rws.space = std::move(sp);
    rws.nu.weights.resize(N + 1);
    rws.walk.rows.resize(N + 1);
    for (int n = 0; n <= N; ++n) rws.nu.weights[n] = std::pow(2.0, -n);
    rws.walk.rows[0].push_back({0, 2.0 / 3.0 + ex.trunc.tail_bound});
    for (int n = 1; n <= N; ++n) rws.walk.rows[0].push_back({n, std::pow(4.0, -n)});
    for (int n = 1; n <= N; ++n) {
        rws.walk.rows[n].push_back({0, std::pow(2.0, -n)});
        rws.walk.rows[n].push_back({n, 1.0 - std::pow(2.0, -n)});
    }
    validate(rws);

    std::vector<int> omega;
    for (int n = 1; n <= N; ++n) omega.push_back(n);
    ex.problem = make_problem(rws, std::move(omega), {{0, 0.0}});
    ex.rws = std::move(rws);
    return ex;
}

ScalarField gen_poincare_witness(const DomainProblem& problem, int k, double q) {
    const int N = static_cast<int>(problem.decomp.omega.size());
    if (k + 1 > N) throw WitnessExceedsTruncation("witness depth exceeds the truncation");
    ScalarField u(N, 0.0);
    for (int i = 0; i < N; ++i) {
        int n = problem.decomp.omega[i];
        if (n <= k + 1) u[i] = std::pow(2.0, (n - 1) / q);
    }
    return u;
}

namespace {

double horizontal_weight(int j) {  // edge between columns j and j+1
    switch (j % 3) {
        case 0: return std::pow(2.0, -(j / 3));
        case 1: return std::pow(4.0, -((j - 1) / 3));
        default: return std::pow(2.0, -((j - 2) / 3));
    }
}

}  // namespace

GeneratedExample gen_tworow_counterexample(int N) {
    if (N < 3) throw Error("two-row counterexample needs N >= 3");

    const int last = 3 * N + 2;
    auto bottom = [](int j) { return 2 * (j - 2); };
    auto top = [](int j) { return 2 * (j - 2) + 1; };

    StateSpace sp;
    sp.n = 2 * (last - 1);
    sp.labels.resize(sp.n);
    for (int j = 2; j <= last; ++j) {
        sp.labels[bottom(j)] = std::to_string(j);
        sp.labels[top(j)] = std::to_string(j) + "~";
    }

    std::vector<WeightTriple> w;
    for (int j = 2; j < last; ++j) {
        double h = horizontal_weight(j);
        w.push_back({bottom(j), bottom(j + 1), h});
        w.push_back({top(j), top(j + 1), h});
    }
    for (int j = 2; j <= last; ++j) w.push_back({bottom(j), top(j), std::pow(8.0, -(j / 3))});

    GeneratedExample ex;
    ex.trunc.depth = N;
    ex.trunc.tail_bound = 2.0 * horizontal_weight(last);  // dropped edges to column 3N+3
    ex.rws = build_from_symmetric_weights(std::move(sp), w);

    std::vector<int> omega;
    BoundaryData psi;
    for (int j = 2; j <= last; ++j) {
        omega.push_back(bottom(j));
        psi.emplace_back(top(j), (j % 2 == 0) ? 1.0 : -1.0);
    }
    std::sort(psi.begin(), psi.end());
    ex.problem = make_problem(ex.rws, sorted_unique(std::move(omega)), std::move(psi));
    return ex;
}

ScalarField gen_tworow_witness(const DomainProblem& problem, int k) {
    const auto& om = problem.decomp.omega;
    int last_column = 2 + (static_cast<int>(om.size()) - 1);
    if (3 * k + 2 > last_column)
        throw WitnessExceedsTruncation("witness depth exceeds the truncation");
    ScalarField u(om.size(), 0.0);
    for (size_t i = 0; i < om.size(); ++i) {
        int column = om[i] / 2 + 2;
        if (column >= 3 * k + 2) u[i] = 1.0;
    }
    return u;
}

RecurrenceTrace propagate_calibration_recurrence(int D, double g23) {
    if (D < 2) throw Error("recurrence propagation needs depth >= 2");

    RecurrenceTrace tr;
    // Start deep enough that the compounded vertical slack stays below the
    // seed: sum_t 2^(D-t) * 3 * 4^-(k0+t) <= (3/7) 2^D 8^-k0 4^-k0... bounded
    // by (3/7) 4^-k0 per doubling step, so k0 = D/2 + 2 suffices.
    tr.start_depth = D / 2 + 2;

    double lo = g23, hi = g23;
    tr.steps.push_back({0, lo, hi});
    for (int t = 1; t <= D; ++t) {
        double slack = 3.0 * std::pow(4.0, -(tr.start_depth + t));
        lo = 2.0 * lo - slack;
        hi = 2.0 * hi + slack;
        // a bounded calibration must keep every iterate inside [-1, 1]
        if (lo > 1.0 || hi < -1.0) {
            tr.steps.push_back({t, lo, hi});
            tr.no_bounded_solution = true;
            return tr;
        }
        lo = std::max(lo, -1.0);
        hi = std::min(hi, 1.0);
        tr.steps.push_back({t, lo, hi});
    }
    return tr;
}

}  // namespace mrws
