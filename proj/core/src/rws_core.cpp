#include "mrws/rws_core.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

namespace mrws {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_labels(StateSpace& s) {
    if (static_cast<int>(s.labels.size()) != s.n) {
        s.labels.resize(s.n);
        for (int i = 0; i < s.n; ++i)
            if (s.labels[i].empty()) s.labels[i] = std::to_string(i);
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : s.labels)
        if (!seen.insert(l).second) throw Error("duplicate state label: " + l);
}

void sort_row(std::vector<RandomWalk::Entry>& row) {
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.to < b.to; });
}

void check_stochastic(const RandomWalk& w) {
    for (size_t x = 0; x < w.rows.size(); ++x) {
        double s = 0;
        for (const auto& e : w.rows[x]) {
            if (e.p < 0) throw NotStochastic("negative probability in row " + std::to_string(x));
            s += e.p;
        }
        if (std::abs(s - 1.0) > kRowSumTol)
            throw NotStochastic("row " + std::to_string(x) + " sums to " + std::to_string(s));
    }
}

}  // namespace

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

RandomWalkSpace build_from_symmetric_weights(StateSpace states,
                                             const std::vector<WeightTriple>& weights) {
    check_labels(states);
    const int n = states.n;
    std::vector<std::map<int, double>> w(n);
    for (const auto& t : weights) {
        if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n) throw Error("weight index out of range");
        if (t.w < 0) throw AsymmetricWeights("negative weight");
        if (t.i == t.j || t.w == 0) continue;
        auto put = [&](int a, int b) {
            auto [it, fresh] = w[a].emplace(b, t.w);
            if (!fresh && std::abs(it->second - t.w) > 1e-12)
                throw AsymmetricWeights("conflicting weight for pair (" + std::to_string(t.i) +
                                        "," + std::to_string(t.j) + ")");
        };
        put(t.i, t.j);
        put(t.j, t.i);
    }
    RandomWalkSpace rws;
    rws.space = std::move(states);
    rws.nu.weights.resize(n);
    rws.walk.rows.resize(n);
    for (int x = 0; x < n; ++x) {
        double d = 0;
        for (const auto& [y, wxy] : w[x]) d += wxy;
        if (d <= 0) throw IsolatedState(x);
        rws.nu.weights[x] = d;
        for (const auto& [y, wxy] : w[x]) rws.walk.rows[x].push_back({y, wxy / d});
    }
    rws.flags.invariance_ok = Tri::True;
    rws.flags.reversibility_ok = Tri::True;  // nu(x) m_x(y) = w_xy = w_yx algebraically
    rws.flags.invariance_residual = 0.0;
    rws.flags.reversibility_residual = 0.0;
    return rws;
}

RandomWalkSpace build_from_markov_kernel(StateSpace states,
                                         const std::vector<std::vector<RandomWalk::Entry>>& kernel,
                                         std::optional<Measure> pi) {
    check_labels(states);
    const int n = states.n;
    if (static_cast<int>(kernel.size()) != n) throw Error("kernel row count mismatch");
    RandomWalkSpace rws;
    rws.space = std::move(states);
    rws.walk.rows = kernel;
    for (auto& row : rws.walk.rows) {
        sort_row(row);
        row.erase(std::remove_if(row.begin(), row.end(),
                                 [](const auto& e) { return e.p == 0.0; }),
                  row.end());
    }
    check_stochastic(rws.walk);

    if (pi) {
        if (static_cast<int>(pi->weights.size()) != n) throw Error("pi size mismatch");
        for (double v : pi->weights)
            if (v <= 0) throw Error("pi must be strictly positive");
        rws.nu = std::move(*pi);
    } else if (n <= 2000) {
        // Solve pi K = pi, sum pi = 1 as a dense linear system.
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n);
        for (int x = 0; x < n; ++x)
            for (const auto& e : rws.walk.rows[x]) A(e.to, x) += e.p;
        for (int i = 0; i < n; ++i) A(i, i) -= 1.0;
        for (int i = 0; i < n; ++i) A(n, i) = 1.0;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
        b(n) = 1.0;
        Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
        double res = (A * x - b).cwiseAbs().maxCoeff();
        if (res > 1e-8 || x.minCoeff() <= 0)
            throw NoStationaryMeasure("no strictly positive stationary vector found");
        rws.nu.weights.assign(x.data(), x.data() + n);
    } else {
        std::vector<double> p(n, 1.0 / n), q(n);
        bool done = false;
        for (long it = 0; it < 1000000 && !done; ++it) {
            std::fill(q.begin(), q.end(), 0.0);
            for (int x = 0; x < n; ++x)
                for (const auto& e : rws.walk.rows[x]) q[e.to] += p[x] * e.p;
            double diff = 0;
            for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(q[i] - p[i]));
            p.swap(q);
            done = diff <= 1e-12;
        }
        if (!done) throw NoStationaryMeasure("power iteration did not converge");
        for (double v : p)
            if (v <= 0) throw NoStationaryMeasure("stationary vector not strictly positive");
        rws.nu.weights = std::move(p);
    }
    validate(rws);
    return rws;
}

RandomWalkSpace build_epsilon_step(StateSpace states, Measure mu, double eps) {
    check_labels(states);
    if (!states.metric) throw MissingMetric("epsilon-step walk requires a metric");
    const int n = states.n;
    RandomWalkSpace rws;
    rws.walk.rows.resize(n);
    for (int x = 0; x < n; ++x) {
        double ball = 0;
        for (int y = 0; y < n; ++y)
            if (states.dist(x, y) <= eps) ball += mu(y);
        for (int y = 0; y < n; ++y)
            if (states.dist(x, y) <= eps) rws.walk.rows[x].push_back({y, mu(y) / ball});
    }
    rws.space = std::move(states);
    rws.nu = std::move(mu);
    validate(rws);
    return rws;
}

RandomWalkSpace build_annulus_step(StateSpace states, Measure mu, double eps, double delta) {
    check_labels(states);
    if (!states.metric) throw MissingMetric("annulus-step walk requires a metric");
    if (!(0 <= delta && delta < eps)) throw Error("need 0 <= delta < eps");
    const int n = states.n;
    RandomWalkSpace rws;
    rws.walk.rows.resize(n);
    for (int x = 0; x < n; ++x) {
        double mass = 0;
        for (int y = 0; y < n; ++y) {
            double d = states.dist(x, y);
            if (delta < d && d <= eps) mass += mu(y);
        }
        if (mass <= 0) throw EmptyAnnulus(x);
        for (int y = 0; y < n; ++y) {
            double d = states.dist(x, y);
            if (delta < d && d <= eps) rws.walk.rows[x].push_back({y, mu(y) / mass});
        }
    }
    rws.space = std::move(states);
    rws.nu = std::move(mu);
    validate(rws);
    return rws;
}

RandomWalkSpace restrict_to_domain(const RandomWalkSpace& rws, std::vector<int> omega) {
    omega = sorted_unique(std::move(omega));
    if (omega.empty()) throw EmptyDomain("restriction to an empty domain");
    const int k = static_cast<int>(omega.size());
    std::vector<int> newidx(rws.n(), -1);
    for (int i = 0; i < k; ++i) newidx[omega[i]] = i;

    RandomWalkSpace out;
    out.space.n = k;
    out.space.labels.resize(k);
    for (int i = 0; i < k; ++i) out.space.labels[i] = rws.space.labels[omega[i]];
    if (rws.space.coords) {
        out.space.coords.emplace(k);
        for (int i = 0; i < k; ++i) (*out.space.coords)[i] = (*rws.space.coords)[omega[i]];
    }
    if (rws.space.metric) {
        out.space.metric.emplace(static_cast<size_t>(k) * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                (*out.space.metric)[static_cast<size_t>(i) * k + j] =
                    rws.space.dist(omega[i], omega[j]);
    }
    out.nu.weights.resize(k);
    out.walk.rows.resize(k);
    for (int i = 0; i < k; ++i) {
        int x = omega[i];
        out.nu.weights[i] = rws.nu(x);
        double leaked = 0;
        for (const auto& e : rws.walk.rows[x]) {
            if (newidx[e.to] >= 0)
                out.walk.rows[i].push_back({newidx[e.to], e.p});
            else
                leaked += e.p;
        }
        if (leaked > 0) {
            bool merged = false;
            for (auto& e : out.walk.rows[i])
                if (e.to == i) {
                    e.p += leaked;
                    merged = true;
                }
            if (!merged) out.walk.rows[i].push_back({i, leaked});
        }
        sort_row(out.walk.rows[i]);
    }
    validate(out);
    return out;
}

CertificateReport validate_invariance(const RandomWalkSpace& rws, double tol) {
    const int n = rws.n();
    std::vector<double> in(n, 0.0);
    for (int x = 0; x < n; ++x)
        for (const auto& e : rws.walk.rows[x]) in[e.to] += rws.nu(x) * e.p;
    CertificateReport rep;
    rep.kind = "invariance";
    rep.tolerance = tol;
    int worst = -1;
    for (int y = 0; y < n; ++y) {
        double r = std::abs(rws.nu(y) - in[y]) / rws.nu(y);
        if (r > rep.max_residual) {
            rep.max_residual = r;
            worst = y;
        }
    }
    rep.pass = rep.max_residual <= tol;
    if (worst >= 0) rep.detail = "worst state " + rws.space.labels[worst];
    return rep;
}

CertificateReport validate_reversibility(const RandomWalkSpace& rws, double tol) {
    CertificateReport rep;
    rep.kind = "reversibility";
    rep.tolerance = tol;
    bool support_symmetric = true;
    for (int x = 0; x < rws.n(); ++x) {
        for (const auto& e : rws.walk.rows[x]) {
            int y = e.to;
            // each unordered pair once; pairs absent from the lower-index row
            // are handled from the higher-index side
            if (y < x && rws.walk.prob(y, x) > 0) continue;
            double fwd = rws.nu(x) * e.p;
            double bwd = rws.nu(y) * rws.walk.prob(y, x);
            double scale = std::max(1.0, fwd);
            double r = std::abs(fwd - bwd) / scale;
            if (r > rep.max_residual) {
                rep.max_residual = r;
                rep.detail = "worst pair (" + rws.space.labels[x] + "," + rws.space.labels[y] + ")";
            }
            if ((fwd > 0) != (bwd > 0)) support_symmetric = false;
        }
    }
    rep.pass = rep.max_residual <= tol && support_symmetric;
    if (!support_symmetric && rep.detail.empty()) rep.detail = "asymmetric support";
    return rep;
}

void validate(RandomWalkSpace& rws, double tol) {
    auto inv = validate_invariance(rws, tol);
    auto rev = validate_reversibility(rws, tol);
    rws.flags.invariance_ok = inv.pass ? Tri::True : Tri::False;
    rws.flags.reversibility_ok = rev.pass ? Tri::True : Tri::False;
    rws.flags.invariance_residual = inv.max_residual;
    rws.flags.reversibility_residual = rev.max_residual;
}

ErgodicityResult is_ergodic(const RandomWalkSpace& rws) {
    const int n = rws.n();
    // Union of forward supports; nu > 0 so nu(x) m_x(y) > 0 iff m_x(y) > 0.
    std::vector<std::vector<int>> adj(n);
    for (int x = 0; x < n; ++x)
        for (const auto& e : rws.walk.rows[x])
            if (e.p > 0 && e.to != x) {
                adj[x].push_back(e.to);
                adj[e.to].push_back(x);
            }
    std::vector<int> comp(n, -1);
    std::vector<int> stack;
    int nc = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = nc;
        stack.push_back(s);
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : adj[x])
                if (comp[y] < 0) {
                    comp[y] = nc;
                    stack.push_back(y);
                }
        }
        ++nc;
    }
    ErgodicityResult res;
    res.ergodic = (nc <= 1);
    if (!res.ergodic) {
        for (int i = 0; i < n; ++i)
            (comp[i] == 0 ? res.part_a : res.part_b).push_back(i);
    }
    return res;
}

BoundaryResult m_boundary(const RandomWalkSpace& rws, std::vector<int> omega) {
    omega = sorted_unique(std::move(omega));
    for (int x : omega)
        if (x < 0 || x >= rws.n()) throw Error("omega index out of range");
    BoundaryResult res;
    res.decomp.omega = omega;
    double bmass = 0;
    for (int x = 0; x < rws.n(); ++x) {
        if (contains(omega, x)) continue;
        double m = 0;
        for (const auto& e : rws.walk.rows[x])
            if (contains(omega, e.to)) m += e.p;
        if (m > 0) {
            res.decomp.boundary.push_back(x);
            bmass += rws.nu(x);
        }
    }
    res.decomp.omega_m = res.decomp.omega;
    res.decomp.omega_m.insert(res.decomp.omega_m.end(), res.decomp.boundary.begin(),
                              res.decomp.boundary.end());
    std::sort(res.decomp.omega_m.begin(), res.decomp.omega_m.end());
    res.zero_boundary_mass_warning = (bmass <= 0);
    return res;
}

std::vector<WeightTriple> extract_weights(const RandomWalkSpace& rws) {
    std::vector<WeightTriple> out;
    for (int x = 0; x < rws.n(); ++x)
        for (const auto& e : rws.walk.rows[x])
            if (e.to > x && e.p > 0) out.push_back({x, e.to, rws.nu(x) * e.p});
    return out;
}

}  // namespace mrws
