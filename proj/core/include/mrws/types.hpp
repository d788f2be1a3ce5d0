#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrws {

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IsolatedState : Error {
    int state;
    explicit IsolatedState(int s)
        : Error("state " + std::to_string(s) + " has zero total weight"), state(s) {}
};
struct AsymmetricWeights : Error {
    using Error::Error;
};
struct NotStochastic : Error {
    using Error::Error;
};
struct NoStationaryMeasure : Error {
    using Error::Error;
};
struct MissingMetric : Error {
    using Error::Error;
};
struct EmptyAnnulus : Error {
    int state;
    explicit EmptyAnnulus(int s)
        : Error("annulus around state " + std::to_string(s) + " has zero mass"), state(s) {}
};
struct EmptyDomain : Error {
    using Error::Error;
};
struct NotReversible : Error {
    using Error::Error;
};
struct ProblemTooLarge : Error {
    using Error::Error;
};
struct BoundaryMismatch : Error {
    std::vector<int> missing, extra;
    BoundaryMismatch(std::vector<int> mi, std::vector<int> ex)
        : Error("boundary data does not match the computed m-boundary"),
          missing(std::move(mi)), extra(std::move(ex)) {}
};
struct EmptyBoundary : Error {
    using Error::Error;
};
struct InvalidExponent : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct NonNestedCuts : Error {
    using Error::Error;
};
struct ZeroDenominator : Error {
    using Error::Error;
};
struct Unbounded : Error {
    using Error::Error;
};
struct ZeroAlpha : Error {
    int shell;
    explicit ZeroAlpha(int j)
        : Error("shell " + std::to_string(j) + " has zero mass toward the previous shell"),
          shell(j) {}
};
struct SupportMismatch : Error {
    using Error::Error;
};
struct MedianViolated : Error {
    using Error::Error;
};
struct WitnessExceedsTruncation : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Core data

/// Finite state set, optionally carrying coordinates and/or a metric table.
struct StateSpace {
    int n = 0;
    std::vector<std::string> labels;                 // unique, size n
    std::optional<std::vector<std::vector<double>>> coords;
    std::optional<std::vector<double>> metric;       // dense n*n, symmetric, zero diagonal

    double dist(int i, int j) const {
        if (!metric) throw MissingMetric("state space carries no metric");
        return (*metric)[static_cast<size_t>(i) * n + j];
    }
};

/// Strictly positive weight per state.
struct Measure {
    std::vector<double> weights;
    double total() const {
        double s = 0;
        for (double w : weights) s += w;
        return s;
    }
    double operator()(int i) const { return weights[i]; }
};

/// Sparse row-stochastic kernel; rows sorted by target index, no explicit zeros.
struct RandomWalk {
    struct Entry {
        int to;
        double p;
    };
    std::vector<std::vector<Entry>> rows;

    double prob(int x, int y) const {
        const auto& r = rows[x];
        size_t lo = 0, hi = r.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (r[mid].to < y)
                lo = mid + 1;
            else
                hi = mid;
        }
        return (lo < r.size() && r[lo].to == y) ? r[lo].p : 0.0;
    }
    /// m_x(A) for a sorted index set A.
    double mass(int x, const std::vector<int>& sorted_set) const;
};

enum class Tri { False, True, Unchecked };

struct ValidationFlags {
    Tri invariance_ok = Tri::Unchecked;
    Tri reversibility_ok = Tri::Unchecked;
    Tri ergodic = Tri::Unchecked;
    double invariance_residual = std::nan("");
    double reversibility_residual = std::nan("");
};

struct RandomWalkSpace {
    StateSpace space;
    RandomWalk walk;
    Measure nu;
    ValidationFlags flags;

    int n() const { return space.n; }
};

/// Omega, its m-boundary and their union (all sorted index vectors).
struct DomainDecomposition {
    std::vector<int> omega;
    std::vector<int> boundary;
    std::vector<int> omega_m;
};

using ScalarField = std::vector<double>;

/// Sparse pair field aligned with the walk's row structure: values[x][k]
/// belongs to the pair (x, rows[x][k].to).
struct PairField {
    std::vector<std::vector<double>> values;

    static PairField zeros_like(const RandomWalk& w) {
        PairField f;
        f.values.resize(w.rows.size());
        for (size_t x = 0; x < w.rows.size(); ++x) f.values[x].assign(w.rows[x].size(), 0.0);
        return f;
    }
    double get(const RandomWalk& w, int x, int y) const {
        const auto& r = w.rows[x];
        for (size_t k = 0; k < r.size(); ++k)
            if (r[k].to == y) return values[x][k];
        return 0.0;
    }
    double sup_norm() const {
        double m = 0;
        for (const auto& row : values)
            for (double v : row) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Pass/fail verdict with per-constraint residuals.
struct CertificateReport {
    bool pass = false;
    std::string kind;
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::string detail;  // worst offender description
};

inline bool contains(const std::vector<int>& sorted_set, int v) {
    size_t lo = 0, hi = sorted_set.size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (sorted_set[mid] < v)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo < sorted_set.size() && sorted_set[lo] == v;
}

inline double RandomWalk_mass_impl(const RandomWalk& w, int x, const std::vector<int>& s) {
    double m = 0;
    for (const auto& e : w.rows[x])
        if (contains(s, e.to)) m += e.p;
    return m;
}
inline double RandomWalk::mass(int x, const std::vector<int>& sorted_set) const {
    return RandomWalk_mass_impl(*this, x, sorted_set);
}

}  // namespace mrws
