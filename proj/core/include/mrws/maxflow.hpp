#pragma once

#include <vector>

namespace mrws::detail {

/// Dinic max flow on double capacities. Computes a genuine flow (no preflow
/// residue), so both residual-reachability cut extractions below are valid.
/// Nodes are 0..n-1; add arcs before calling solve().
class MaxFlow {
public:
    explicit MaxFlow(int n);

    /// Adds a forward arc of capacity `cap` and its reverse of capacity
    /// `rev_cap` (symmetric undirected edges pass the same value twice).
    void add_edge(int from, int to, double cap, double rev_cap);

    double solve(int source, int sink);

    /// Minimal source-side min cut: nodes reachable from the source in the
    /// residual graph. Valid after solve().
    std::vector<char> min_cut_source_side() const;

    /// Maximal source-side min cut: complement of the nodes that reach the
    /// sink in the residual graph.
    std::vector<char> max_cut_source_side() const;

private:
    struct Arc {
        int to;
        int rev;  // index of the reverse arc in graph_[to]
        double cap;
    };
    int n_;
    int source_ = -1, sink_ = -1;
    std::vector<std::vector<Arc>> graph_;
    std::vector<int> level_, iter_;

    bool bfs_levels();
    double dfs_augment(int u, double limit);
};

}  // namespace mrws::detail
