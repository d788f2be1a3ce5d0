#include "mrws/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace mrws::detail {

namespace {
constexpr double kFlowEps = 1e-13;
}

MaxFlow::MaxFlow(int n) : n_(n), graph_(n) {}

void MaxFlow::add_edge(int from, int to, double cap, double rev_cap) {
    graph_[from].push_back({to, static_cast<int>(graph_[to].size()), cap});
    graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, rev_cap});
}

bool MaxFlow::bfs_levels() {
    level_.assign(n_, -1);
    std::queue<int> q;
    level_[source_] = 0;
    q.push(source_);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (const Arc& a : graph_[u])
            if (a.cap > kFlowEps && level_[a.to] < 0) {
                level_[a.to] = level_[u] + 1;
                q.push(a.to);
            }
    }
    return level_[sink_] >= 0;
}

double MaxFlow::dfs_augment(int u, double limit) {
    if (u == sink_) return limit;
    for (int& i = iter_[u]; i < static_cast<int>(graph_[u].size()); ++i) {
        Arc& a = graph_[u][i];
        if (a.cap <= kFlowEps || level_[a.to] != level_[u] + 1) continue;
        double got = dfs_augment(a.to, std::min(limit, a.cap));
        if (got > kFlowEps) {
            a.cap -= got;
            graph_[a.to][a.rev].cap += got;
            return got;
        }
    }
    level_[u] = -1;  // dead end on this phase
    return 0.0;
}

double MaxFlow::solve(int source, int sink) {
    source_ = source;
    sink_ = sink;
    double flow = 0;
    while (bfs_levels()) {
        iter_.assign(n_, 0);
        for (;;) {
            double got = dfs_augment(source_, std::numeric_limits<double>::infinity());
            if (got <= kFlowEps) break;
            flow += got;
        }
    }
    return flow;
}

std::vector<char> MaxFlow::min_cut_source_side() const {
    std::vector<char> side(n_, 0);
    std::vector<int> stack{source_};
    side[source_] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const Arc& a : graph_[u])
            if (a.cap > kFlowEps && !side[a.to]) {
                side[a.to] = 1;
                stack.push_back(a.to);
            }
    }
    return side;
}

std::vector<char> MaxFlow::max_cut_source_side() const {
    std::vector<char> reaches(n_, 0);
    std::vector<int> stack{sink_};
    reaches[sink_] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        // u is reachable backwards through any arc with residual capacity
        for (const Arc& a : graph_[u])
            if (graph_[a.to][a.rev].cap > kFlowEps && !reaches[a.to]) {
                reaches[a.to] = 1;
                stack.push_back(a.to);
            }
    }
    std::vector<char> side(n_, 0);
    for (int u = 0; u < n_; ++u) side[u] = !reaches[u];
    return side;
}

}  // namespace mrws::detail
