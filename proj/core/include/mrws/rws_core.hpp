#pragma once

#include <utility>

#include "mrws/types.hpp"

namespace mrws {

// Sparse symmetric weight table: upper-triangle (or full) triples (i, j, w).
struct WeightTriple {
    int i, j;
    double w;
};

/// Weighted-graph walk: m_x(y) = w_xy / d_x, nu(x) = d_x.
/// Detailed balance holds algebraically, so the flag is set exactly.
RandomWalkSpace build_from_symmetric_weights(StateSpace states,
                                             const std::vector<WeightTriple>& weights);

/// Markov-kernel walk. When pi is absent the stationary vector is computed by
/// solving pi K = pi (dense LU for n <= 2000, power iteration beyond).
RandomWalkSpace build_from_markov_kernel(StateSpace states,
                                         const std::vector<std::vector<RandomWalk::Entry>>& kernel,
                                         std::optional<Measure> pi = std::nullopt);

/// Jump uniformly (w.r.t. mu) in the closed ball of radius eps. The ball
/// contains x itself, so every row carries a self-atom.
RandomWalkSpace build_epsilon_step(StateSpace states, Measure mu, double eps);

/// Jump uniformly in the annulus delta < d(x,y) <= eps (excludes x).
RandomWalkSpace build_annulus_step(StateSpace states, Measure mu, double eps, double delta);

/// m^Omega: mass leaking out of Omega is folded into a self-atom.
RandomWalkSpace restrict_to_domain(const RandomWalkSpace& rws, std::vector<int> omega);

CertificateReport validate_invariance(const RandomWalkSpace& rws, double tol = 1e-9);
CertificateReport validate_reversibility(const RandomWalkSpace& rws, double tol = 1e-9);

/// Recompute both validation flags in place.
void validate(RandomWalkSpace& rws, double tol = 1e-9);

struct ErgodicityResult {
    bool ergodic;
    // When not ergodic: a witness partition (A, B) with L_m(A, B) = 0.
    std::vector<int> part_a, part_b;
};

/// Connectivity of the undirected support graph (edge iff nu(x) m_x(y) > 0,
/// self-loops ignored).
ErgodicityResult is_ergodic(const RandomWalkSpace& rws);

struct BoundaryResult {
    DomainDecomposition decomp;
    bool zero_boundary_mass_warning = false;
};

BoundaryResult m_boundary(const RandomWalkSpace& rws, std::vector<int> omega);

/// Edge weights w_xy = nu(x) m_x(y) of a reversible space (round-trip helper).
std::vector<WeightTriple> extract_weights(const RandomWalkSpace& rws);

std::vector<int> sorted_unique(std::vector<int> v);

}  // namespace mrws
