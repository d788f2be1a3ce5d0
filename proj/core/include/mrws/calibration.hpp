#pragma once

#include "mrws/least_gradient.hpp"
#include "mrws/types.hpp"

namespace mrws {

struct CalibrationCertificate {
    PairField g;
    double sup_defect = 0;           // max(0, |g| - 1)
    double antisymmetry_defect = 0;  // max |g(x,y) + g(y,x)| over symmetric support
    double sign_defect = 0;          // max |g(x,y) - sign(delta)| where |delta| > tol
    double divergence_defect = 0;    // max over x in Omega of |sum_y g(x,y) m_x(y)|
    double tolerance = 0;
    bool pass = false;
    bool feasible = true;  // find_calibration only
};

/// Checks (a) bound, (b) antisymmetry, (c) sign inclusion, (d) zero row mean
/// at interior states; u is full-length.
CalibrationCertificate verify_calibration(const DomainProblem& problem, const ScalarField& u,
                                          const PairField& g, double tol = 1e-9);

/// Fixes g = sign(delta) on steep pairs, then solves the LP feasibility
/// problem on flat pairs; feasible = false means no certificate exists within
/// 1e-8 (exact rational elimination decides instances with <= 30 free pairs).
CalibrationCertificate find_calibration(const DomainProblem& problem, const ScalarField& u,
                                        double tol = 1e-9);

struct MedianReport {
    struct StateEntry {
        int state;
        double m_plus, m_minus, m_zero;
        bool ok;
    };
    std::vector<StateEntry> entries;  // one per state of Omega
    bool pass = true;
    double tau = 0;
};

/// Dead-band tau: |delta| <= tau counts as a tie (E_0).
MedianReport median_value_check(const DomainProblem& problem, const ScalarField& u,
                                double tau = 1e-9);

/// +-1 on the strict level sets and the balancing constant on ties; satisfies
/// every calibration condition except possibly antisymmetry.
PairField median_pseudocalibration(const DomainProblem& problem, const ScalarField& u);

}  // namespace mrws
