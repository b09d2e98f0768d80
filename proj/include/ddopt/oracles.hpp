#pragma once

#include <cstdint>
#include <vector>

#include "ddopt/common.hpp"
#include "ddopt/graph.hpp"

// Ground-truth solvers, deliberately independent of the DD compiler:
// exactness tests compare the two implementations against each other.

namespace ddopt {

namespace detail {

inline void misp_bb(const Graph& g, Bitset remaining, int current, int& best) {
    const int cnt = remaining.count();
    if (current + cnt <= best) return;
    if (cnt == 0) {
        best = std::max(best, current);
        return;
    }
    // Branch on the remaining vertex with the most remaining neighbors.
    int pick = -1, pick_deg = -1;
    remaining.for_each([&](int v) {
        Bitset nb = g.neighbor_mask(v);
        nb &= remaining;
        const int d = nb.count();
        if (d > pick_deg) {
            pick_deg = d;
            pick = v;
        }
    });
    if (pick_deg == 0) {  // all remaining vertices are pairwise nonadjacent
        best = std::max(best, current + cnt);
        return;
    }
    Bitset with = remaining;
    with.reset(pick);
    with.subtract(g.neighbor_mask(pick));
    misp_bb(g, with, current + 1, best);
    Bitset without = remaining;
    without.reset(pick);
    misp_bb(g, without, current, best);
}

}  // namespace detail

// Exact maximum independent set size by branch and bound.
inline int brute_force_misp(const Graph& g) {
    if (g.n() > 30) throw ConfigError("brute_force_misp supports n <= 30");
    if (g.n() == 0) return 0;
    Bitset all(g.n());
    all.set_all();
    int best = 0;
    detail::misp_bb(g, all, 0, best);
    return best;
}

// Exact maximum cut weight; enumerates the 2^(n-1) partitions with vertex 0
// pinned to one side, walking a Gray code so each step flips one vertex.
inline std::int64_t brute_force_mcp(const Graph& g) {
    if (g.n() > 24) throw ConfigError("brute_force_mcp supports n <= 24");
    const int n = g.n();
    if (n <= 1) return 0;
    std::vector<char> side(n, 0);  // 0 or 1; vertex 0 stays on side 0
    std::int64_t cut = 0, best = 0;
    const std::uint64_t steps = 1ULL << (n - 1);
    for (std::uint64_t i = 1; i < steps; ++i) {
        const int v = __builtin_ctzll(i) + 1;  // Gray code flip, skipping vertex 0
        std::int64_t delta = 0;
        for (auto [u, w] : g.adjacent(v)) delta += (side[u] == side[v]) ? w : -w;
        side[v] ^= 1;
        cut += delta;
        best = std::max(best, cut);
    }
    return best;
}

}  // namespace ddopt
