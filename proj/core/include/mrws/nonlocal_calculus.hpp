#pragma once

#include "mrws/types.hpp"

namespace mrws {

/// L_m(A, B) = sum_{x in A} nu(x) m_x(B).
double interaction(const RandomWalkSpace& rws, const std::vector<int>& a,
                   const std::vector<int>& b);

/// P_m(E) = L_m(E, X \ E).
double perimeter(const RandomWalkSpace& rws, const std::vector<int>& e);

/// TV_m(u) = 1/2 sum nu(x) m_x(y) |u(y) - u(x)|; when `restrict` is given,
/// only pairs with both ends inside it contribute.
double total_variation(const RandomWalkSpace& rws, const ScalarField& u,
                       const std::vector<int>* restrict_to = nullptr);

PairField nonlocal_gradient(const RandomWalkSpace& rws, const ScalarField& u);

/// (div_m z)(x) = 1/2 sum_y (z(x,y) - z(y,x)) m_x(y).
ScalarField divergence(const RandomWalkSpace& rws, const PairField& z);

/// |<u, div_m z>_nu + 1/2 <grad u, z>_{nu x m}|; vanishes on reversible spaces.
double greens_identity_residual(const RandomWalkSpace& rws, const ScalarField& u,
                                const PairField& z, bool force = false);

/// Exact layer-cake integral of P_m(E_t) over the distinct values of u.
double coarea_integral(const RandomWalkSpace& rws, const ScalarField& u);

struct DualOptions {
    long max_iter = 100000;
    double gap_tol = 1e-8;
    int bruteforce_pair_limit = 20;
    long var_guard = 20000;
};

/// sup { <u, div_m z>_nu : |z| <= 1 } computed through the divergence
/// operator (projected ascent; exhaustive vertex search on tiny supports).
double tv_dual_value(const RandomWalkSpace& rws, const ScalarField& u,
                     const DualOptions& opts = {}, bool force = false);

/// Complement of a sorted index set in {0..n-1}.
std::vector<int> complement(int n, const std::vector<int>& sorted_set);

}  // namespace mrws
