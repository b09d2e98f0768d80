#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ddopt/common.hpp"

namespace ddopt {

struct Edge {
    int u, v;  // u < v
    int w;
    bool operator==(const Edge&) const = default;
};

// Weighted simple undirected graph with dense 0-based vertex ids.
// Immutable after construction.
class Graph {
public:
    Graph() = default;

    Graph(int n, std::vector<Edge> edges) : n_(n) {
        for (auto& e : edges) {
            if (e.u > e.v) std::swap(e.u, e.v);
            if (e.u < 0 || e.v >= n || e.u == e.v)
                throw ConfigError("bad edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
        }
        std::sort(edges.begin(), edges.end(),
                  [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
        for (std::size_t i = 1; i < edges.size(); ++i)
            if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
                throw ConfigError("duplicate edge (" + std::to_string(edges[i].u) + "," +
                                  std::to_string(edges[i].v) + ")");
        edges_ = std::move(edges);
        adj_.assign(n_, {});
        nbr_mask_.assign(n_, Bitset(n_));
        for (const auto& e : edges_) {
            adj_[e.u].push_back({e.v, e.w});
            adj_[e.v].push_back({e.u, e.w});
            nbr_mask_[e.u].set(e.v);
            nbr_mask_[e.v].set(e.u);
        }
        for (auto& a : adj_) std::sort(a.begin(), a.end());
    }

    int n() const { return n_; }
    int m() const { return int(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    int degree(int v) const {
        check_vertex(v);
        return int(adj_[v].size());
    }

    std::vector<int> neighbors(int v) const {
        check_vertex(v);
        std::vector<int> out;
        out.reserve(adj_[v].size());
        for (auto [u, w] : adj_[v]) out.push_back(u);
        return out;
    }

    // Sum of weights of edges incident to v.
    long long incident_weight(int v) const {
        check_vertex(v);
        long long s = 0;
        for (auto [u, w] : adj_[v]) s += w;
        return s;
    }

    // Adjacent (neighbor, weight) pairs, sorted by neighbor id.
    const std::vector<std::pair<int, int>>& adjacent(int v) const { return adj_[v]; }

    // Neighbors of v as a bitmask.
    const Bitset& neighbor_mask(int v) const { return nbr_mask_[v]; }

    bool has_edge(int u, int v) const { return u >= 0 && u < n_ && v >= 0 && v < n_ && nbr_mask_[u].test(v); }

    int weight(int u, int v) const {
        auto it = std::lower_bound(adj_[u].begin(), adj_[u].end(), std::pair<int, int>{v, 0});
        if (it == adj_[u].end() || it->first != v) return 0;
        return it->second;
    }

    bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

private:
    void check_vertex(int v) const {
        if (v < 0 || v >= n_) throw ConfigError("vertex " + std::to_string(v) + " out of range");
    }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    std::vector<Bitset> nbr_mask_;
};

// ---------------------------------------------------------------
// Barabasi-Albert generator
// ---------------------------------------------------------------

struct BaConfig {
    int n = 0;
    int nu = 1;  // attachment parameter, 1 <= nu < n
    int weight_low = 1;
    int weight_high = 1;
    std::uint64_t seed = 0;
};

// Preferential attachment with the repeated-endpoints urn, starting from
// nu isolated vertices. Vertex t in [nu, n) attaches nu distinct edges to
// existing vertices; the first new vertex necessarily links to all of
// 0..nu-1. Every generated graph has exactly nu*(n-nu) edges.
inline Graph generate_ba(const BaConfig& cfg) {
    if (cfg.nu < 1 || cfg.nu >= cfg.n)
        throw ConfigError("BA attachment parameter must satisfy 1 <= nu < n (nu=" +
                          std::to_string(cfg.nu) + ", n=" + std::to_string(cfg.n) + ")");
    if (cfg.weight_low < 1 || cfg.weight_low > cfg.weight_high)
        throw ConfigError("BA weight bounds must satisfy 1 <= low <= high");

    Rng rng(cfg.seed);
    std::vector<Edge> edges;
    edges.reserve(std::size_t(cfg.nu) * (cfg.n - cfg.nu));
    std::vector<int> urn;  // one entry per arc endpoint
    urn.reserve(2 * std::size_t(cfg.nu) * (cfg.n - cfg.nu));
    std::vector<int> targets;
    std::vector<char> in_targets(cfg.n, 0);

    for (int t = cfg.nu; t < cfg.n; ++t) {
        targets.clear();
        if (t == cfg.nu) {
            for (int u = 0; u < cfg.nu; ++u) targets.push_back(u);
        } else {
            while (int(targets.size()) < cfg.nu) {
                int u = urn[rng.below(urn.size())];
                if (!in_targets[u]) {
                    in_targets[u] = 1;
                    targets.push_back(u);
                }
            }
            for (int u : targets) in_targets[u] = 0;
        }
        for (int u : targets) {
            int w = rng.int_in(cfg.weight_low, cfg.weight_high);
            edges.push_back({u, t, w});
            urn.push_back(u);
            urn.push_back(t);
        }
    }
    return Graph(cfg.n, std::move(edges));
}

// ---------------------------------------------------------------
// Instance file I/O
//
// Text format: optional "c ..." comment lines, one "p edge <n> <m>"
// header, then m lines "e <u> <v> <w>" with 1-based endpoints.
// ---------------------------------------------------------------

inline void save_instance(const Graph& g, std::ostream& os) {
    os << "p edge " << g.n() << " " << g.m() << "\n";
    for (const auto& e : g.edges()) os << "e " << e.u + 1 << " " << e.v + 1 << " " << e.w << "\n";
}

inline void save_instance(const Graph& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    save_instance(g, f);
    if (!f) throw IoError("write failed: " + path);
}

inline Graph load_instance(std::istream& is) {
    std::string line;
    int lineno = 0;
    int n = -1, m = -1;
    std::vector<Edge> edges;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ss(line);
        char kind;
        ss >> kind;
        if (kind == 'p') {
            std::string fmt;
            if (!(ss >> fmt >> n >> m) || fmt != "edge" || n < 0 || m < 0)
                throw ParseError("bad problem line '" + line + "'", lineno);
            edges.reserve(m);
        } else if (kind == 'e') {
            if (n < 0) throw ParseError("edge before problem line", lineno);
            int u, v, w;
            if (!(ss >> u >> v >> w)) throw ParseError("bad edge line '" + line + "'", lineno);
            if (u < 1 || u > n || v < 1 || v > n || u == v)
                throw ParseError("edge endpoints out of range", lineno);
            int a = std::min(u, v) - 1, b = std::max(u, v) - 1;
            for (const auto& e : edges)
                if (e.u == a && e.v == b) throw ParseError("duplicate edge", lineno);
            edges.push_back({a, b, w});
        } else {
            throw ParseError(std::string("unknown line kind '") + kind + "'", lineno);
        }
    }
    if (n < 0) throw ParseError("missing problem line");
    if (int(edges.size()) != m) throw ParseError("expected " + std::to_string(m) + " edges, found " +
                                                 std::to_string(edges.size()));
    try {
        return Graph(n, std::move(edges));
    } catch (const ConfigError& e) {
        throw ParseError(e.what());
    }
}

inline Graph load_instance(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    return load_instance(f);
}

}  // namespace ddopt
