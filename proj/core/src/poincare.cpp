#include "mrws/poincare.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mrws {

namespace {

double pw(double t, double q) { return std::pow(std::abs(t), q); }

double numerator(const DomainProblem& problem, const ScalarField& full,
                 const BoundaryData& psi, double q) {
    double s = 0;
    for (int x : problem.decomp.omega) {
        double row = 0;
        for (const auto& e : problem.rws.walk.rows[x])
            if (contains(problem.decomp.omega_m, e.to)) row += e.p * pw(full[e.to] - full[x], q);
        s += problem.rws.nu(x) * row;
    }
    for (const auto& [b, v] : psi) s += problem.rws.nu(b) * pw(v, q);
    return s;
}

ScalarField make_full(const DomainProblem& problem, const ScalarField& u_omega,
                      const BoundaryData& psi) {
    ScalarField full(problem.rws.n(), 0.0);
    for (size_t i = 0; i < problem.decomp.omega.size(); ++i)
        full[problem.decomp.omega[i]] = u_omega[i];
    for (const auto& [b, v] : psi) full[b] = v;
    return full;
}

}  // namespace

double poincare_ratio(const DomainProblem& problem, const ScalarField& u_omega,
                      const BoundaryData* psi_override, double q) {
    const BoundaryData& psi = psi_override ? *psi_override : problem.psi;
    double denom = 0;
    for (size_t i = 0; i < problem.decomp.omega.size(); ++i)
        denom += problem.rws.nu(problem.decomp.omega[i]) * pw(u_omega[i], q);
    if (denom <= 0) throw ZeroDenominator("witness vanishes on omega");
    return numerator(problem, make_full(problem, u_omega, psi), psi, q) / denom;
}

PoincareEstimate best_constant(const DomainProblem& problem, double q,
                               const BestConstantOptions& opts) {
    if (q < 1) throw InvalidExponent("best_constant requires q >= 1");
    const auto& om = problem.decomp.omega;
    const int k = static_cast<int>(om.size());

    PoincareEstimate est;
    est.q = q;
    est.notes = "variational upper bound; the global infimum is not certified";

    auto psi_closed_form = [&](const ScalarField& u_omega) {
        // q = 2: per-boundary-state quadratic in psi(y)
        BoundaryData psi;
        for (const auto& [b, unused] : problem.psi) {
            double num = 0, den = problem.rws.nu(b);
            for (int i = 0; i < k; ++i) {
                double p = problem.rws.walk.prob(om[i], b);
                num += problem.rws.nu(om[i]) * p * u_omega[i];
                den += problem.rws.nu(om[i]) * p;
            }
            psi.emplace_back(b, den > 0 ? num / den : 0.0);
        }
        return psi;
    };

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    for (int start = 0; start < opts.starts; ++start) {
        ScalarField u(k);
        if (start == 0)
            std::fill(u.begin(), u.end(), 1.0);
        else
            for (double& v : u) v = box(rng);
        BoundaryData psi = problem.psi;
        for (auto& [b, v] : psi) v = 0.0;

        double ratio = std::numeric_limits<double>::infinity();
        double step = 0.1;
        for (int round = 0; round < opts.max_rounds; ++round) {
            if (q == 2.0)
                psi = psi_closed_form(u);
            double cur;
            try {
                cur = poincare_ratio(problem, u, &psi, q);
            } catch (const ZeroDenominator&) {
                break;
            }
            if (std::isfinite(ratio) && std::abs(ratio - cur) <= opts.stall_tol * std::max(1.0, cur))
                break;
            ratio = std::min(ratio, cur);

            // subgradient of numerator/denominator in (u, psi); normalized step
            ScalarField full = make_full(problem, u, psi);
            double den = 0;
            for (int i = 0; i < k; ++i) den += problem.rws.nu(om[i]) * pw(u[i], q);
            double num = numerator(problem, full, psi, q);
            ScalarField gu(k, 0.0);
            std::vector<double> gpsi(psi.size(), 0.0);
            std::vector<int> bpos(problem.rws.n(), -1);
            for (size_t j = 0; j < psi.size(); ++j) bpos[psi[j].first] = static_cast<int>(j);
            std::vector<int> opos(problem.rws.n(), -1);
            for (int i = 0; i < k; ++i) opos[om[i]] = i;
            for (int i = 0; i < k; ++i) {
                int x = om[i];
                for (const auto& e : problem.rws.walk.rows[x]) {
                    if (!contains(problem.decomp.omega_m, e.to)) continue;
                    double t = full[e.to] - full[x];
                    double d = q * std::pow(std::abs(t), q - 1) * (t > 0 ? 1 : (t < 0 ? -1 : 0));
                    double w = problem.rws.nu(x) * e.p;
                    gu[i] -= w * d;
                    if (opos[e.to] >= 0) gu[opos[e.to]] += w * d;
                    if (bpos[e.to] >= 0) gpsi[bpos[e.to]] += w * d;
                }
            }
            for (size_t j = 0; j < psi.size(); ++j) {
                double v = psi[j].second;
                gpsi[j] += problem.rws.nu(psi[j].first) * q * std::pow(std::abs(v), q - 1) *
                           (v > 0 ? 1 : (v < 0 ? -1 : 0));
            }
            double gn = 0;
            ScalarField dir(k);
            for (int i = 0; i < k; ++i) {
                double dd = q * std::pow(std::abs(u[i]), q - 1) * (u[i] > 0 ? 1 : (u[i] < 0 ? -1 : 0));
                dir[i] = (gu[i] * den - num * problem.rws.nu(om[i]) * dd) / (den * den);
                gn += dir[i] * dir[i];
            }
            if (q != 2.0)
                for (double g : gpsi) gn += (g / den) * (g / den);
            gn = std::sqrt(gn);
            if (gn < 1e-15) break;

            ScalarField u_try(u);
            BoundaryData psi_try(psi);
            bool moved = false;
            for (int ls = 0; ls < 40; ++ls) {
                for (int i = 0; i < k; ++i) u_try[i] = u[i] - step * dir[i] / gn;
                if (q != 2.0)
                    for (size_t j = 0; j < psi.size(); ++j)
                        psi_try[j].second = psi[j].second - step * (gpsi[j] / den) / gn;
                double r_try;
                try {
                    r_try = poincare_ratio(problem, u_try, &psi_try, q);
                } catch (const ZeroDenominator&) {
                    step *= 0.5;
                    continue;
                }
                if (r_try < cur) {
                    u = u_try;
                    psi = psi_try;
                    step *= 1.5;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        if (!(ratio >= est.lambda_upper)) {  // nan-safe improvement test
            est.lambda_upper = ratio;
            est.witness_u = u;
            est.witness_psi = psi;
        }
    }

    if (q == 2.0 && k >= 1 && k <= 500) {
        // with psi eliminated the numerator is a quadratic form in u, so the
        // optimal witness is the smallest generalized eigenvector
        auto n_opt = [&](const ScalarField& u_omega) {
            BoundaryData psi = psi_closed_form(u_omega);
            return numerator(problem, make_full(problem, u_omega, psi), psi, 2.0);
        };
        Eigen::MatrixXd Q(k, k);
        std::vector<double> diag(k);
        for (int i = 0; i < k; ++i) {
            ScalarField e(k, 0.0);
            e[i] = 1.0;
            diag[i] = n_opt(e);
            Q(i, i) = diag[i];
        }
        for (int i = 0; i < k; ++i)
            for (int jj = i + 1; jj < k; ++jj) {
                ScalarField e(k, 0.0);
                e[i] = e[jj] = 1.0;
                double v = 0.5 * (n_opt(e) - diag[i] - diag[jj]);
                Q(i, jj) = Q(jj, i) = v;
            }
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) D(i, i) = problem.rws.nu(om[i]);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Q, D);
        if (ges.info() == Eigen::Success) {
            ScalarField u(k);
            for (int i = 0; i < k; ++i) u[i] = ges.eigenvectors().col(0)(i);
            BoundaryData psi = psi_closed_form(u);
            try {
                double r = poincare_ratio(problem, u, &psi, 2.0);
                if (!(r >= est.lambda_upper)) {
                    est.lambda_upper = r;
                    est.witness_u = u;
                    est.witness_psi = psi;
                }
            } catch (const ZeroDenominator&) {
            }
        }
    }
    return est;
}

PoincareEstimate layered_lower_bound(const DomainProblem& problem, double q,
                                     const ShellMetric& metric) {
    PoincareEstimate est;
    est.q = q;
    est.notes = "shell recurrence lower bound";
    est.shells.b0 = problem.decomp.boundary;

    std::vector<char> assigned(problem.rws.n(), 0);
    for (int b : problem.decomp.boundary) assigned[b] = 1;
    std::vector<int> prev = problem.decomp.boundary;
    size_t covered = 0;
    int j = 0;
    double csum = 0, cprev = 0;
    while (covered < problem.decomp.omega.size()) {
        ++j;
        std::vector<int> shell;
        for (int x : problem.decomp.omega) {
            if (assigned[x]) continue;
            if (metric.use_metric) {
                double dmin = std::numeric_limits<double>::infinity();
                for (int y : prev) dmin = std::min(dmin, problem.rws.space.dist(x, y));
                if (dmin <= metric.width) shell.push_back(x);
            } else {
                if (problem.rws.walk.mass(x, prev) > 0) shell.push_back(x);
            }
        }
        if (shell.empty())
            throw Unbounded("shells fail to exhaust omega (disconnected from the boundary)");
        double alpha = std::numeric_limits<double>::infinity();
        for (int x : shell) alpha = std::min(alpha, problem.rws.walk.mass(x, prev));
        if (alpha <= 0) throw ZeroAlpha(j);
        double beta = std::pow(2.0, q) / alpha;
        double c = beta * (1.0 + cprev);
        est.shells.shells.push_back(shell);
        est.shells.alphas.push_back(alpha);
        est.shells.coefficients.push_back(c);
        csum += c;
        cprev = c;
        for (int x : shell) assigned[x] = 1;
        covered += shell.size();
        prev = shell;
        std::sort(prev.begin(), prev.end());
    }
    est.lambda_lower = 1.0 / csum;
    return est;
}

}  // namespace mrws
