#include "mrws/nonlocal_calculus.hpp"

#include <algorithm>
#include <cmath>

namespace mrws {

std::vector<int> complement(int n, const std::vector<int>& sorted_set) {
    std::vector<int> out;
    out.reserve(n - sorted_set.size());
    size_t k = 0;
    for (int i = 0; i < n; ++i) {
        if (k < sorted_set.size() && sorted_set[k] == i)
            ++k;
        else
            out.push_back(i);
    }
    return out;
}

double interaction(const RandomWalkSpace& rws, const std::vector<int>& a,
                   const std::vector<int>& b) {
    double s = 0;
    for (int x : a) {
        double m = 0;
        for (const auto& e : rws.walk.rows[x])
            if (contains(b, e.to)) m += e.p;
        s += rws.nu(x) * m;
    }
    return s;
}

double perimeter(const RandomWalkSpace& rws, const std::vector<int>& e) {
    return interaction(rws, e, complement(rws.n(), e));
}

double total_variation(const RandomWalkSpace& rws, const ScalarField& u,
                       const std::vector<int>* restrict_to) {
    double s = 0;
    if (restrict_to) {
        for (int x : *restrict_to) {
            double row = 0;
            for (const auto& e : rws.walk.rows[x])
                if (contains(*restrict_to, e.to)) row += e.p * std::abs(u[e.to] - u[x]);
            s += rws.nu(x) * row;
        }
    } else {
        for (int x = 0; x < rws.n(); ++x) {
            double row = 0;
            for (const auto& e : rws.walk.rows[x]) row += e.p * std::abs(u[e.to] - u[x]);
            s += rws.nu(x) * row;
        }
    }
    return 0.5 * s;
}

PairField nonlocal_gradient(const RandomWalkSpace& rws, const ScalarField& u) {
    PairField g = PairField::zeros_like(rws.walk);
    for (int x = 0; x < rws.n(); ++x) {
        const auto& row = rws.walk.rows[x];
        for (size_t k = 0; k < row.size(); ++k) g.values[x][k] = u[row[k].to] - u[x];
    }
    return g;
}

ScalarField divergence(const RandomWalkSpace& rws, const PairField& z) {
    ScalarField d(rws.n(), 0.0);
    for (int x = 0; x < rws.n(); ++x) {
        const auto& row = rws.walk.rows[x];
        double s = 0;
        for (size_t k = 0; k < row.size(); ++k)
            s += (z.values[x][k] - z.get(rws.walk, row[k].to, x)) * row[k].p;
        d[x] = 0.5 * s;
    }
    return d;
}

double greens_identity_residual(const RandomWalkSpace& rws, const ScalarField& u,
                                const PairField& z, bool force) {
    if (!force && rws.flags.reversibility_ok != Tri::True)
        throw NotReversible("Green's identity requires a reversible space");
    ScalarField d = divergence(rws, z);
    double lhs = 0;
    for (int x = 0; x < rws.n(); ++x) lhs += u[x] * d[x] * rws.nu(x);
    double rhs = 0;
    for (int x = 0; x < rws.n(); ++x) {
        const auto& row = rws.walk.rows[x];
        for (size_t k = 0; k < row.size(); ++k)
            rhs += (u[row[k].to] - u[x]) * z.values[x][k] * rws.nu(x) * row[k].p;
    }
    return std::abs(lhs + 0.5 * rhs);
}

double coarea_integral(const RandomWalkSpace& rws, const ScalarField& u) {
    std::vector<double> vals(u);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (vals.size() < 2) return 0.0;
    double s = 0;
    for (size_t i = 0; i + 1 < vals.size(); ++i) {
        std::vector<int> level;  // strict superlevel set {u > t_i}
        for (int x = 0; x < rws.n(); ++x)
            if (u[x] > vals[i]) level.push_back(x);
        s += perimeter(rws, level) * (vals[i + 1] - vals[i]);
    }
    return s;
}

double tv_dual_value(const RandomWalkSpace& rws, const ScalarField& u, const DualOptions& opts,
                     bool force) {
    if (!force && rws.flags.reversibility_ok != Tri::True)
        throw NotReversible("the dual characterization presumes a reversible space");
    // Linear objective <u, div_m z>_nu; the coefficient of each stored pair is
    // obtained from the divergence operator applied to unit pair fields, which
    // reduces to the closed form below.
    struct PairRef {
        int x;
        size_t k;
        double coef;
    };
    std::vector<PairRef> pairs;
    long nvars = 0;
    for (int x = 0; x < rws.n(); ++x) {
        const auto& row = rws.walk.rows[x];
        for (size_t k = 0; k < row.size(); ++k) {
            int y = row[k].to;
            double c = 0.5 * (u[x] * rws.nu(x) * row[k].p -
                              u[y] * rws.nu(y) * rws.walk.prob(y, x));
            pairs.push_back({x, k, c});
            ++nvars;
        }
    }
    if (nvars > opts.var_guard) throw ProblemTooLarge("dual problem exceeds the variable guard");

    auto objective = [&](const PairField& z) {
        ScalarField d = divergence(rws, z);
        double s = 0;
        for (int x = 0; x < rws.n(); ++x) s += u[x] * d[x] * rws.nu(x);
        return s;
    };

    if (nvars <= opts.bruteforce_pair_limit) {
        PairField z = PairField::zeros_like(rws.walk);
        double best = objective(z);  // z = 0 vertex of the relaxation interior
        for (long mask = 0; mask < (1L << nvars); ++mask) {
            for (long i = 0; i < nvars; ++i)
                z.values[pairs[i].x][pairs[i].k] = (mask >> i) & 1 ? 1.0 : -1.0;
            best = std::max(best, objective(z));
        }
        return best;
    }

    PairField z = PairField::zeros_like(rws.walk);
    double ub = 0;
    for (const auto& p : pairs) ub += std::abs(p.coef);
    double step = 1.0;
    double obj = 0;
    for (long it = 0; it < opts.max_iter; ++it) {
        for (const auto& p : pairs) {
            double& v = z.values[p.x][p.k];
            v = std::clamp(v + step * p.coef, -1.0, 1.0);
        }
        obj = objective(z);
        if (ub - obj <= opts.gap_tol * std::max(1.0, ub)) break;
        step *= 2.0;
    }
    return obj;
}

}  // namespace mrws
