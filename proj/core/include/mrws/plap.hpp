#pragma once

#include "mrws/least_gradient.hpp"
#include "mrws/types.hpp"

namespace mrws {

struct PlapOptions {
    double tol = 1e-12;
    int max_iter = 200;
};

/// F_p(u) = (1/2p) sum_{x,y in Omega_m} nu(x) m_x(y) |u_psi(y) - u_psi(x)|^p.
double energy_p(const DomainProblem& problem, const ScalarField& u_omega, double p);

/// R(x) = -sum_y m_x(y) |u_psi(y) - u(x)|^{p-2} (u_psi(y) - u(x)) on Omega;
/// a solution has R = 0.
ScalarField residual_p(const DomainProblem& problem, const ScalarField& u_omega, double p);

/// Damped Newton minimization of F_p; asserts the max principle on output.
ScalarField solve_p(const DomainProblem& problem, double p, const PlapOptions& opts = {});

/// Same, warm-started from init (indexed like decomp.omega) when non-null.
ScalarField solve_p_from(const DomainProblem& problem, double p, const ScalarField* init,
                         const PlapOptions& opts = {});

struct ContinuationTracePoint {
    double p;
    double energy_fp;
    double energy_j;
    double residual_norm;
};

struct ContinuationResult {
    ScalarField u;  // full-length extension of the last iterate
    PairField g;    // clipped p-flux on the pair support
    std::vector<ContinuationTracePoint> p_trace;
    bool converged = false;
    double clip_magnitude = 0;  // largest amount removed by clipping g
};

struct ContinuationOptions {
    PlapOptions solver;
    double tol = 1e-6;  // Cauchy-trend tolerance on J_psi along the schedule
};

std::vector<double> default_schedule();  // 1 + 2^-k, k = 0..10

ContinuationResult continuation_to_one(const DomainProblem& problem,
                                       const std::vector<double>& schedule,
                                       const ContinuationOptions& opts = {});

}  // namespace mrws
