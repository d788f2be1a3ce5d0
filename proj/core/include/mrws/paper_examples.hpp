#pragma once

#include "mrws/least_gradient.hpp"
#include "mrws/types.hpp"

namespace mrws {

struct TruncationSpec {
    int depth = 0;
    std::string tail_policy = "self-loop-fold";
    double tail_bound = 0;  // exact folded / dropped mass
};

struct GeneratedExample {
    RandomWalkSpace rws;
    DomainProblem problem;
    TruncationSpec trunc;
};

/// Chain 0..N with nu(n) = 2^-n; state 0 absorbs the kernel tail into its
/// self-atom, keeping invariance and reversibility exact. Omega = {1..N},
/// psi(0) = 0.
GeneratedExample gen_markov_counterexample(int N);

/// Witness u(n) = 2^{(n-1)/q} for 1 <= n <= k+1, zero beyond, on the chain's
/// Omega; poincare_ratio with psi = 0 is <= 2/k.
ScalarField gen_poincare_witness(const DomainProblem& problem, int k, double q);

/// Two-row ladder on columns 2..3N+2 with the geometric horizontal/vertical
/// weights; nu = degree. Omega = bottom row, psi(top column j) = (-1)^j.
GeneratedExample gen_tworow_counterexample(int N);

/// Indicator of the bottom states in columns >= 3k+2; ratio with psi = 0 is
/// <= 3 * 2^-k.
ScalarField gen_tworow_witness(const DomainProblem& problem, int k);

struct RecurrenceStep {
    int step;
    double lo, hi;  // reachable interval for g(3k+2, 3k+3) at this depth
};

struct RecurrenceTrace {
    std::vector<RecurrenceStep> steps;
    bool no_bounded_solution = false;
    int start_depth = 0;
};

/// Interval propagation of g(3k+2,3k+3) = 2 g(3k-1,3k) - 4^-k (three terms in
/// [-1,1]), seeded at a depth where the compounded slack stays below 1; any
/// |g23| >= 2^-(D-2) is rejected within D steps.
RecurrenceTrace propagate_calibration_recurrence(int D, double g23);

}  // namespace mrws
