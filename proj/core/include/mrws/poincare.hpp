#pragma once

#include "mrws/least_gradient.hpp"
#include "mrws/types.hpp"

namespace mrws {

struct ShellDecomposition {
    std::vector<std::vector<int>> shells;  // B_1..B_l, partition of Omega
    std::vector<int> b0;                   // B_0 = m-boundary
    std::vector<double> alphas;            // alpha_j = min_{x in B_j} m_x(B_{j-1})
    std::vector<double> coefficients;      // c_j = beta_j (1 + c_{j-1}), beta_j = 2^q/alpha_j
};

struct PoincareEstimate {
    double q = 2;
    double lambda_upper = std::nan("");
    ScalarField witness_u;       // on Omega
    BoundaryData witness_psi;
    double lambda_lower = std::nan("");
    ShellDecomposition shells;
    std::string notes;
};

/// [sum_{x in Omega} nu(x) sum_{y in Omega_m} m_x(y)|u_psi(y) - u(x)|^q
///  + sum_{boundary} nu |psi|^q] / sum_{Omega} nu |u|^q.
double poincare_ratio(const DomainProblem& problem, const ScalarField& u_omega,
                      const BoundaryData* psi_override, double q);

struct BestConstantOptions {
    int starts = 5;
    int max_rounds = 2000;
    double stall_tol = 1e-10;
    unsigned long long seed = 0x5EED;
};

/// Alternating minimization upper bound on the best constant; the witness
/// certifies the bound but the infimum claim is heuristic.
PoincareEstimate best_constant(const DomainProblem& problem, double q,
                               const BestConstantOptions& opts = {});

struct ShellMetric {
    bool use_metric = false;
    double width = 0;  // metric shell width; hop distance when use_metric is false
};

/// Shell recurrence lower bound lambda_lb = 1 / sum_j c_j.
PoincareEstimate layered_lower_bound(const DomainProblem& problem, double q,
                                     const ShellMetric& metric = {});

}  // namespace mrws
