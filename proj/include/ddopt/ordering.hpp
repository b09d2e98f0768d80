#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "ddopt/common.hpp"
#include "ddopt/dd.hpp"
#include "ddopt/graph.hpp"
#include "ddopt/misp_model.hpp"

namespace ddopt {

enum class OrderingKind { rand, mpd, deg, maxw, min, learned };

inline const char* to_string(OrderingKind k) {
    switch (k) {
        case OrderingKind::rand: return "rand";
        case OrderingKind::mpd: return "mpd";
        case OrderingKind::deg: return "deg";
        case OrderingKind::maxw: return "maxw";
        case OrderingKind::min: return "min";
        default: return "learned";
    }
}

inline OrderingKind ordering_from_string(const std::string& s) {
    if (s == "rand") return OrderingKind::rand;
    if (s == "mpd") return OrderingKind::mpd;
    if (s == "deg") return OrderingKind::deg;
    if (s == "maxw") return OrderingKind::maxw;
    if (s == "min") return OrderingKind::min;
    if (s == "learned") return OrderingKind::learned;
    throw ConfigError("unknown ordering '" + s + "'");
}

inline std::vector<int> rand_ordering(const Graph& g, std::uint64_t seed) {
    std::vector<int> perm(g.n());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);
    return perm;
}

// Maximal path decomposition: grow a path from the lowest-indexed unvisited
// vertex, extending the back and then the front toward the lowest-indexed
// unvisited neighbor until both ends are stuck; paths are concatenated in
// creation order. Consecutive vertices inside a path are adjacent and every
// path endpoint has all neighbors earlier in the ordering, which is what
// caps exact MISP layer widths at the Fibonacci numbers.
inline std::vector<int> mpd_ordering(const Graph& g) {
    const int n = g.n();
    std::vector<char> visited(n, 0);
    std::vector<int> out;
    out.reserve(n);

    auto lowest_unvisited_neighbor = [&](int v) {
        for (auto [u, w] : g.adjacent(v))
            if (!visited[u]) return u;
        return -1;
    };

    for (int s = 0; s < n; ++s) {
        if (visited[s]) continue;
        std::vector<int> back{s}, front;
        visited[s] = 1;
        for (int u = lowest_unvisited_neighbor(back.back()); u >= 0;
             u = lowest_unvisited_neighbor(back.back())) {
            visited[u] = 1;
            back.push_back(u);
        }
        for (int u = lowest_unvisited_neighbor(s); u >= 0; u = lowest_unvisited_neighbor(front.empty() ? s : front.back())) {
            visited[u] = 1;
            front.push_back(u);
        }
        for (auto it = front.rbegin(); it != front.rend(); ++it) out.push_back(*it);
        out.insert(out.end(), back.begin(), back.end());
    }
    return out;
}

inline std::vector<int> deg_ordering(const Graph& g) {
    std::vector<int> perm(g.n());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](int a, int b) { return g.degree(a) < g.degree(b); });
    return perm;
}

inline std::vector<int> maxweight_ordering(const Graph& g) {
    std::vector<int> perm(g.n());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](int a, int b) { return g.incident_weight(a) > g.incident_weight(b); });
    return perm;
}

// Dynamic MISP heuristic: pick the remaining vertex appearing in the fewest
// eligible sets of the last built layer; ties go to the lowest id.
inline int min_states_next(const DecisionDiagram<MispModel>& dd, const std::vector<int>& remaining) {
    if (remaining.empty()) throw ConfigError("min_states_next: no remaining vertices");
    const auto& layer = dd.layers().back();
    int best = -1;
    long best_count = -1;
    for (int v : remaining) {
        long c = 0;
        for (const auto& node : layer)
            if (node.state.eligible.test(v)) ++c;
        if (best < 0 || c < best_count || (c == best_count && v < best)) {
            best = v;
            best_count = c;
        }
    }
    return best;
}

}  // namespace ddopt
