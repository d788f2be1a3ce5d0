#pragma once

#include <utility>

#include "mrws/types.hpp"

namespace mrws {

/// Dirichlet data: one (boundary state, value) per state of the m-boundary,
/// sorted by state index.
using BoundaryData = std::vector<std::pair<int, double>>;

struct DomainProblem {
    RandomWalkSpace rws;
    DomainDecomposition decomp;
    BoundaryData psi;
    bool ergodic_warning = false;
    bool zero_boundary_mass_warning = false;

    double psi_at(int state) const;
    double psi_sup() const;
    /// Full-length field equal to psi on the boundary and u on Omega
    /// (zero elsewhere); u is indexed like decomp.omega.
    ScalarField extend(const ScalarField& u_omega) const;
    std::vector<double> distinct_boundary_values() const;
};

enum class TieBreak { Minimal, Maximal };

struct LevelCut {
    double threshold;
    double cut_value;
};

struct SolveReport {
    ScalarField u;  // full-length, psi on the boundary, zero off Omega_m
    double energy = 0;
    std::string method;
    std::string tie_break;
    std::vector<LevelCut> diagnostics;

    ScalarField u_on(const std::vector<int>& omega) const {
        ScalarField v(omega.size());
        for (size_t i = 0; i < omega.size(); ++i) v[i] = u[omega[i]];
        return v;
    }
};

DomainProblem make_problem(RandomWalkSpace rws, std::vector<int> omega, BoundaryData psi);

/// J_psi(u) = TV_m of the extension, with pairs restricted to Omega_m x Omega_m.
double relaxed_energy(const DomainProblem& problem, const ScalarField& u_omega);

ScalarField clamp_to_boundary_range(const ScalarField& u_omega, const BoundaryData& psi);

/// Exact minimizer via per-threshold min cuts over the sorted distinct
/// boundary values; tie_break selects the pointwise-minimal or -maximal
/// minimizer (nested cuts).
SolveReport solve_exact(const DomainProblem& problem, TieBreak tie_break = TieBreak::Minimal);

/// Exhaustive oracle over grid^Omega; default grid = distinct boundary values.
SolveReport solve_bruteforce(const DomainProblem& problem,
                             const std::vector<double>* grid = nullptr);

/// Is u (given on all of X) of m-least gradient on omega?
bool is_least_gradient(const RandomWalkSpace& rws, const ScalarField& u, std::vector<int> omega,
                       double tol = 1e-9);

/// Does chi of the strict superlevel set of the extension at t minimize the
/// energy over characteristic functions with the induced boundary trace?
bool superlevel_minimality(const DomainProblem& problem, const ScalarField& u_omega, double t,
                           bool force_bruteforce = false);

}  // namespace mrws
