#include "mrws/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>

namespace mrws {

namespace {

using Rational = boost::multiprecision::cpp_rational;

int sign_of(double d) { return d > 0 ? 1 : (d < 0 ? -1 : 0); }

/// Rows of "c . v <= d" over variables j..F-1 after j eliminations.
struct Inequality {
    std::vector<Rational> c;
    Rational d;
};

/// Fourier-Motzkin elimination in variable order 0..F-1; stages[j] is the
/// system before eliminating variable j, used for back-substitution.
bool fm_feasible(const std::vector<Inequality>& input, int nvars, std::vector<double>& point) {
    std::vector<std::vector<Inequality>> stages;
    std::vector<Inequality> cur = input;
    for (int j = 0; j < nvars; ++j) {
        stages.push_back(cur);
        std::vector<Inequality> next;
        std::vector<const Inequality*> pos, neg;
        for (const auto& row : cur) {
            if (row.c[j] > 0)
                pos.push_back(&row);
            else if (row.c[j] < 0)
                neg.push_back(&row);
            else
                next.push_back(row);
        }
        for (const auto* p : pos)
            for (const auto* n : neg) {
                Inequality comb;
                comb.c.assign(nvars, 0);
                Rational a = p->c[j], b = -n->c[j];
                for (int k = j + 1; k < nvars; ++k) comb.c[k] = b * p->c[k] + a * n->c[k];
                comb.d = b * p->d + a * n->d;
                next.push_back(std::move(comb));
                if (next.size() > 200000) throw ProblemTooLarge("elimination blow-up");
            }
        cur = std::move(next);
    }
    for (const auto& row : cur)
        if (row.d < 0) return false;

    point.assign(nvars, 0.0);
    std::vector<Rational> val(nvars, 0);
    for (int j = nvars - 1; j >= 0; --j) {
        Rational lo = -1, hi = 1;
        for (const auto& row : stages[j]) {
            if (row.c[j] == 0) continue;
            Rational r = row.d;
            for (int k = j + 1; k < nvars; ++k) r -= row.c[k] * val[k];
            Rational bound = r / row.c[j];
            if (row.c[j] > 0)
                hi = std::min(hi, bound);
            else
                lo = std::max(lo, bound);
        }
        val[j] = (lo + hi) / 2;
        point[j] = static_cast<double>(val[j]);
    }
    return true;
}

}  // namespace

CalibrationCertificate verify_calibration(const DomainProblem& problem, const ScalarField& u,
                                          const PairField& g, double tol) {
    const auto& walk = problem.rws.walk;
    if (g.values.size() != walk.rows.size()) throw SupportMismatch("pair field shape");
    for (size_t x = 0; x < walk.rows.size(); ++x)
        if (g.values[x].size() != walk.rows[x].size()) throw SupportMismatch("pair field row");

    CalibrationCertificate cert;
    cert.g = g;
    cert.tolerance = tol;
    for (int x : problem.decomp.omega_m) {
        const auto& row = walk.rows[x];
        double mean = 0;
        for (size_t k = 0; k < row.size(); ++k) {
            int y = row[k].to;
            if (!contains(problem.decomp.omega_m, y)) continue;
            double gxy = g.values[x][k];
            cert.sup_defect = std::max(cert.sup_defect, std::abs(gxy) - 1.0);
            if (y == x)
                cert.antisymmetry_defect =
                    std::max(cert.antisymmetry_defect, 2.0 * std::abs(gxy));
            else if (y > x && walk.prob(y, x) > 0)
                cert.antisymmetry_defect =
                    std::max(cert.antisymmetry_defect, std::abs(gxy + g.get(walk, y, x)));
            double delta = u[y] - u[x];
            if (std::abs(delta) > tol)
                cert.sign_defect = std::max(cert.sign_defect, std::abs(gxy - sign_of(delta)));
            mean += gxy * row[k].p;
        }
        if (contains(problem.decomp.omega, x))
            cert.divergence_defect = std::max(cert.divergence_defect, std::abs(mean));
    }
    cert.sup_defect = std::max(cert.sup_defect, 0.0);
    cert.pass = cert.sup_defect <= tol && cert.antisymmetry_defect <= tol &&
                cert.sign_defect <= tol && cert.divergence_defect <= tol;
    return cert;
}

CalibrationCertificate find_calibration(const DomainProblem& problem, const ScalarField& u,
                                        double tol) {
    const auto& walk = problem.rws.walk;
    const auto& om = problem.decomp.omega;

    // one variable or fixed value per unordered pair inside Omega_m
    std::map<std::pair<int, int>, int> var_of;      // canonical pair -> free index
    std::map<std::pair<int, int>, double> fixed;    // canonical pair -> g(a,b), a < b
    for (int x : problem.decomp.omega_m) {
        for (const auto& e : walk.rows[x]) {
            int y = e.to;
            if (y == x || !contains(problem.decomp.omega_m, y)) continue;
            auto key = std::minmax(x, y);
            if (var_of.count(key) || fixed.count(key)) continue;
            double delta = u[key.second] - u[key.first];
            if (std::abs(delta) > tol)
                fixed[key] = static_cast<double>(sign_of(delta));
            else
                var_of[key] = static_cast<int>(var_of.size());
        }
    }
    const int F = static_cast<int>(var_of.size());
    if (F > 5000) throw ProblemTooLarge("too many flat pairs for the feasibility solver");

    // row-mean constraints A v + b = 0, one row per interior state
    const int R = static_cast<int>(om.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(R, F);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(R);
    for (int i = 0; i < R; ++i) {
        int x = om[i];
        for (const auto& e : walk.rows[x]) {
            int y = e.to;
            if (y == x || !contains(problem.decomp.omega_m, y)) continue;
            auto key = std::minmax(x, y);
            double orient = (x == key.first) ? 1.0 : -1.0;
            if (auto it = fixed.find(key); it != fixed.end())
                b(i) += orient * it->second * e.p;
            else
                A(i, var_of.at(key)) += orient * e.p;
        }
    }

    Eigen::VectorXd v = Eigen::VectorXd::Zero(F);
    if (F > 0) {
        v = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-b);
        v = v.cwiseMax(-1.0).cwiseMin(1.0);
        double L = std::max(1e-30, A.squaredNorm());  // Frobenius bound on the Lipschitz constant
        for (int it = 0; it < 50000; ++it) {
            Eigen::VectorXd r = A * v + b;
            if (r.lpNorm<Eigen::Infinity>() <= 1e-12) break;
            v = (v - (1.0 / L) * (A.transpose() * r)).cwiseMax(-1.0).cwiseMin(1.0);
        }
    }
    double residual = (A * v + b).lpNorm<Eigen::Infinity>();

    bool feasible = residual <= 1e-8;
    if (!feasible && F <= 30) {
        // exact oracle: Av <= -b, -Av <= b, -1 <= v <= 1
        std::vector<Inequality> sys;
        for (int i = 0; i < R; ++i) {
            Inequality le, ge;
            le.c.assign(F, 0);
            ge.c.assign(F, 0);
            for (int j = 0; j < F; ++j) {
                le.c[j] = Rational(A(i, j));
                ge.c[j] = -le.c[j];
            }
            le.d = Rational(-b(i));
            ge.d = Rational(b(i));
            sys.push_back(std::move(le));
            sys.push_back(std::move(ge));
        }
        for (int j = 0; j < F; ++j) {
            Inequality up, dn;
            up.c.assign(F, 0);
            dn.c.assign(F, 0);
            up.c[j] = 1;
            dn.c[j] = -1;
            up.d = dn.d = 1;
            sys.push_back(std::move(up));
            sys.push_back(std::move(dn));
        }
        std::vector<double> point;
        feasible = fm_feasible(sys, F, point);
        if (feasible)
            for (int j = 0; j < F; ++j) v(j) = point[j];
    }

    PairField g = PairField::zeros_like(walk);
    for (int x : problem.decomp.omega_m) {
        const auto& row = walk.rows[x];
        for (size_t k = 0; k < row.size(); ++k) {
            int y = row[k].to;
            if (y == x || !contains(problem.decomp.omega_m, y)) continue;
            auto key = std::minmax(x, y);
            double orient = (x == key.first) ? 1.0 : -1.0;
            if (auto it = fixed.find(key); it != fixed.end())
                g.values[x][k] = orient * it->second;
            else
                g.values[x][k] = orient * v(var_of.at(key));
        }
    }

    CalibrationCertificate cert = verify_calibration(problem, u, g, std::max(tol, 1e-6));
    cert.feasible = feasible;
    if (!feasible) cert.pass = false;
    return cert;
}

MedianReport median_value_check(const DomainProblem& problem, const ScalarField& u, double tau) {
    MedianReport rep;
    rep.tau = tau;
    for (int x : problem.decomp.omega) {
        MedianReport::StateEntry e{x, 0, 0, 0, false};
        for (const auto& ent : problem.rws.walk.rows[x]) {
            double delta = u[ent.to] - u[x];
            if (delta > tau)
                e.m_plus += ent.p;
            else if (delta < -tau)
                e.m_minus += ent.p;
            else
                e.m_zero += ent.p;
        }
        e.ok = (e.m_plus + e.m_zero >= 0.5 - tau) && (e.m_minus + e.m_zero >= 0.5 - tau);
        rep.pass = rep.pass && e.ok;
        rep.entries.push_back(e);
    }
    return rep;
}

PairField median_pseudocalibration(const DomainProblem& problem, const ScalarField& u) {
    MedianReport rep = median_value_check(problem, u, 1e-9);
    if (!rep.pass) throw MedianViolated("u does not satisfy the m-median value property");

    const auto& walk = problem.rws.walk;
    PairField g = PairField::zeros_like(walk);
    for (int x : problem.decomp.omega_m) {
        const auto& row = walk.rows[x];
        double m_plus = 0, m_minus = 0, m_zero = 0;
        for (const auto& e : row) {
            if (!contains(problem.decomp.omega_m, e.to)) continue;
            double delta = u[e.to] - u[x];
            if (delta > 1e-9)
                m_plus += e.p;
            else if (delta < -1e-9)
                m_minus += e.p;
            else
                m_zero += e.p;
        }
        double tie_value = m_zero > 0 ? (m_minus - m_plus) / m_zero : 0.0;
        for (size_t k = 0; k < row.size(); ++k) {
            if (!contains(problem.decomp.omega_m, row[k].to)) continue;
            double delta = u[row[k].to] - u[x];
            if (delta > 1e-9)
                g.values[x][k] = 1.0;
            else if (delta < -1e-9)
                g.values[x][k] = -1.0;
            else
                g.values[x][k] = tie_value;
        }
    }
    return g;
}

}  // namespace mrws
