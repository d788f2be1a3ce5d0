#include "mrws/least_gradient.hpp"

#include <algorithm>
#include <cmath>

#include "mrws/maxflow.hpp"
#include "mrws/nonlocal_calculus.hpp"
#include "mrws/rws_core.hpp"

namespace mrws {

double DomainProblem::psi_at(int state) const {
    for (const auto& [s, v] : psi)
        if (s == state) return v;
    throw Error("state is not on the m-boundary");
}

double DomainProblem::psi_sup() const {
    double m = 0;
    for (const auto& [s, v] : psi) m = std::max(m, std::abs(v));
    return m;
}

ScalarField DomainProblem::extend(const ScalarField& u_omega) const {
    ScalarField full(rws.n(), 0.0);
    for (size_t i = 0; i < decomp.omega.size(); ++i) full[decomp.omega[i]] = u_omega[i];
    for (const auto& [s, v] : psi) full[s] = v;
    return full;
}

std::vector<double> DomainProblem::distinct_boundary_values() const {
    std::vector<double> vals;
    vals.reserve(psi.size());
    for (const auto& [s, v] : psi) vals.push_back(v);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

DomainProblem make_problem(RandomWalkSpace rws, std::vector<int> omega, BoundaryData psi) {
    auto br = m_boundary(rws, std::move(omega));
    if (br.decomp.boundary.empty()) throw EmptyBoundary("omega has an empty m-boundary");

    std::sort(psi.begin(), psi.end());
    std::vector<int> missing, extra;
    for (const auto& [s, v] : psi) {
        if (!contains(br.decomp.boundary, s)) extra.push_back(s);
        if (!std::isfinite(v)) throw Error("non-finite boundary value");
    }
    for (int b : br.decomp.boundary) {
        bool found = std::any_of(psi.begin(), psi.end(), [&](const auto& p) { return p.first == b; });
        if (!found) missing.push_back(b);
    }
    if (!missing.empty() || !extra.empty()) throw BoundaryMismatch(missing, extra);

    DomainProblem p;
    p.decomp = std::move(br.decomp);
    p.psi = std::move(psi);
    p.zero_boundary_mass_warning = br.zero_boundary_mass_warning;
    p.ergodic_warning = !is_ergodic(rws).ergodic;
    p.rws = std::move(rws);
    return p;
}

double relaxed_energy(const DomainProblem& problem, const ScalarField& u_omega) {
    ScalarField full = problem.extend(u_omega);
    return total_variation(problem.rws, full, &problem.decomp.omega_m);
}

ScalarField clamp_to_boundary_range(const ScalarField& u_omega, const BoundaryData& psi) {
    double m = 0;
    for (const auto& [s, v] : psi) m = std::max(m, std::abs(v));
    ScalarField out(u_omega);
    for (double& v : out) v = std::clamp(v, -m, m);
    return out;
}

namespace {

/// Symmetrized unordered-pair capacity between Omega_m states.
double pair_capacity(const RandomWalkSpace& rws, int x, int y) {
    return 0.5 * (rws.nu(x) * rws.walk.prob(x, y) + rws.nu(y) * rws.walk.prob(y, x));
}

struct CutInstance {
    // For one threshold: indicator per omega state of the source side.
    std::vector<char> in_cut;
    double cut_value;
};

CutInstance solve_level_cut(const DomainProblem& problem, double threshold, TieBreak tie_break) {
    const auto& om = problem.decomp.omega;
    const int k = static_cast<int>(om.size());
    const int S = k, T = k + 1;
    std::vector<int> pos(problem.rws.n(), -1);
    for (int i = 0; i < k; ++i) pos[om[i]] = i;

    detail::MaxFlow mf(k + 2);
    double constant = 0;
    // interior-interior pairs (each unordered pair once)
    for (int i = 0; i < k; ++i) {
        int x = om[i];
        for (const auto& e : problem.rws.walk.rows[x]) {
            int y = e.to;
            if (!contains(problem.decomp.omega_m, y)) continue;
            if (pos[y] >= 0) {
                if (y > x || problem.rws.walk.prob(y, x) == 0.0) {
                    double c = pair_capacity(problem.rws, x, y);
                    if (c > 0 && y != x) mf.add_edge(i, pos[y], c, c);
                }
            }
        }
    }
    // interior-boundary and boundary-boundary pairs
    std::vector<double> to_source(k, 0.0), to_sink(k, 0.0);
    for (const auto& [b, v] : problem.psi) {
        bool src = v > threshold;
        for (const auto& e : problem.rws.walk.rows[b]) {
            int y = e.to;
            if (pos[y] >= 0) {
                double c = pair_capacity(problem.rws, b, y);
                (src ? to_source : to_sink)[pos[y]] += c;
            } else if (contains(problem.decomp.boundary, y) &&
                       (y > b || problem.rws.walk.prob(y, b) == 0.0)) {
                bool src2 = problem.psi_at(y) > threshold;
                if (src != src2) constant += pair_capacity(problem.rws, b, y);
            }
        }
        // pairs seen only from the interior row (m_b(x) = 0, m_x(b) > 0)
        for (int i = 0; i < k; ++i) {
            int x = om[i];
            if (problem.rws.walk.prob(b, x) == 0.0) {
                double p = problem.rws.walk.prob(x, b);
                if (p > 0) (src ? to_source : to_sink)[i] += 0.5 * problem.rws.nu(x) * p;
            }
        }
    }
    for (int i = 0; i < k; ++i) {
        if (to_source[i] > 0) mf.add_edge(S, i, to_source[i], 0.0);
        if (to_sink[i] > 0) mf.add_edge(i, T, to_sink[i], 0.0);
    }

    CutInstance inst;
    inst.cut_value = mf.solve(S, T) + constant;
    std::vector<char> side = (tie_break == TieBreak::Minimal) ? mf.min_cut_source_side()
                                                             : mf.max_cut_source_side();
    inst.in_cut.assign(side.begin(), side.begin() + k);
    return inst;
}

}  // namespace

SolveReport solve_exact(const DomainProblem& problem, TieBreak tie_break) {
    SolveReport rep;
    rep.method = "mincut";
    rep.tie_break = tie_break == TieBreak::Minimal ? "min" : "max";

    auto vals = problem.distinct_boundary_values();
    const auto& om = problem.decomp.omega;
    ScalarField u_omega(om.size(), vals.front());
    if (vals.size() > 1) {
        std::vector<char> prev;
        for (size_t i = 0; i + 1 < vals.size(); ++i) {
            double mid = 0.5 * (vals[i] + vals[i + 1]);
            CutInstance inst = solve_level_cut(problem, mid, tie_break);
            rep.diagnostics.push_back({mid, inst.cut_value});
            if (!prev.empty()) {
                for (size_t j = 0; j < om.size(); ++j)
                    if (inst.in_cut[j] && !prev[j])
                        throw NonNestedCuts("level cuts failed to nest at threshold " +
                                            std::to_string(mid));
            }
            for (size_t j = 0; j < om.size(); ++j)
                if (inst.in_cut[j]) u_omega[j] += vals[i + 1] - vals[i];
            prev = inst.in_cut;
        }
    }
    rep.u = problem.extend(u_omega);
    rep.energy = relaxed_energy(problem, u_omega);
    return rep;
}

SolveReport solve_bruteforce(const DomainProblem& problem, const std::vector<double>* grid) {
    std::vector<double> g = grid ? *grid : problem.distinct_boundary_values();
    const size_t k = problem.decomp.omega.size();
    double combos = std::pow(static_cast<double>(g.size()), static_cast<double>(k));
    if ((!grid && k > 6) || combos > 1e7)
        throw ProblemTooLarge("brute-force enumeration too large");

    ScalarField u(k, g.front()), best_u(k, g.front());
    std::vector<size_t> idx(k, 0);
    double best = relaxed_energy(problem, u);
    while (true) {
        size_t d = 0;
        while (d < k && ++idx[d] == g.size()) idx[d++] = 0;
        if (d == k) break;
        for (size_t i = 0; i < k; ++i) u[i] = g[idx[i]];
        double e = relaxed_energy(problem, u);
        if (e < best) {
            best = e;
            best_u = u;
        }
    }
    SolveReport rep;
    rep.method = "bruteforce";
    rep.tie_break = "first";
    rep.u = problem.extend(best_u);
    rep.energy = best;
    return rep;
}

bool is_least_gradient(const RandomWalkSpace& rws, const ScalarField& u, std::vector<int> omega,
                       double tol) {
    auto br = m_boundary(rws, std::move(omega));
    BoundaryData psi;
    for (int b : br.decomp.boundary) psi.emplace_back(b, u[b]);
    DomainProblem problem = make_problem(rws, br.decomp.omega, std::move(psi));

    ScalarField u_omega(problem.decomp.omega.size());
    for (size_t i = 0; i < u_omega.size(); ++i) u_omega[i] = u[problem.decomp.omega[i]];
    double mine = relaxed_energy(problem, u_omega);
    double opt = solve_exact(problem).energy;
    // pairs leaving Omega_m contribute the same constant to both candidates
    return mine <= opt + tol * std::max(1.0, opt);
}

bool superlevel_minimality(const DomainProblem& problem, const ScalarField& u_omega, double t,
                           bool force_bruteforce) {
    const auto& om = problem.decomp.omega;
    const size_t k = om.size();

    BoundaryData trace;
    for (const auto& [b, v] : problem.psi) trace.emplace_back(b, v > t ? 1.0 : 0.0);
    DomainProblem indicator = problem;
    indicator.psi = std::move(trace);

    ScalarField chi(k);
    for (size_t i = 0; i < k; ++i) chi[i] = u_omega[i] > t ? 1.0 : 0.0;
    double mine = relaxed_energy(indicator, chi);

    double best;
    if (k <= 14 || force_bruteforce) {
        if (force_bruteforce && k > 14)
            throw ProblemTooLarge("subset enumeration requested beyond 14 states");
        best = mine;
        ScalarField s(k);
        for (unsigned long mask = 0; mask < (1UL << k); ++mask) {
            for (size_t i = 0; i < k; ++i) s[i] = (mask >> i) & 1 ? 1.0 : 0.0;
            best = std::min(best, relaxed_energy(indicator, s));
        }
    } else {
        best = solve_exact(indicator).energy;
    }
    return mine <= best + 1e-9 * std::max(1.0, best);
}

}  // namespace mrws
