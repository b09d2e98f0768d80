#pragma once

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ddopt/dp_model.hpp"

namespace ddopt {

// Max-cut node state: for every unplaced vertex k,
//   sigma[k] = sum of w(u,k) over placed u in T  -  sum over placed u in S.
// Entries of placed vertices are kept at zero so states compare canonically.
struct McpState {
    std::vector<std::int32_t> sigma;
    bool operator==(const McpState&) const = default;
};

// Max cut as a layered DP. Decision 1 puts the vertex in side S, decision 0
// in side T. All costs are kept in half-weight units (cost_denominator 2):
// with t_v = sum of w(u,v) over placed u, placing v in S gains cut weight
// (t_v + sigma_v)/2 and placing it in T gains (t_v - sigma_v)/2, so the
// stored costs are t_v + sigma_v and t_v - sigma_v. Merged nodes relax
// sigma toward zero and compensate incoming arcs, which can cost an odd
// number of half units; the integer half-unit representation keeps every
// bound exact.
class McpModel {
public:
    using State = McpState;
    static constexpr Value cost_denominator = 2;

    explicit McpModel(const Graph& g) : g_(&g) {}

    State root() const { return McpState{std::vector<std::int32_t>(g_->n(), 0)}; }

    std::optional<TransitionResult<State>> transition(const State& s, int v, int d,
                                                      const LayerContext& ctx) const {
        // Cut symmetry: the first placed vertex is pinned to side S.
        if (ctx.inserted_before->empty() && d == 0) return std::nullopt;

        long long tv = 0;
        for (auto [u, w] : g_->adjacent(v))
            if (ctx.placed->test(u)) tv += w;
        const long long sv = s.sigma[v];
        // t_v and sigma_v share parity in exact states, so exact arc costs are
        // whole weights. Merged states may break parity (sigma is relaxed
        // toward zero), leaving a half-unit cost; the integer half-unit
        // representation is exact either way.

        McpState next{s.sigma};
        next.sigma[v] = 0;
        for (auto [u, w] : g_->adjacent(v)) {
            if (u == v || ctx.placed->test(u)) continue;
            next.sigma[u] += (d == 1) ? -w : w;
        }
        const Value cost = (d == 1) ? Value(tv + sv) : Value(tv - sv);
        return TransitionResult<State>{std::move(next), cost};
    }

    // Relax each sigma[k] to the sign-consistent minimum magnitude (zero on
    // sign conflict). Every merged node pays for the slack on its incoming
    // arcs: correction = sum_k (|sigma_k| - |merged sigma_k|) half units.
    MergeResult<State> merge(const std::vector<const State*>& group, const LayerContext&) const {
        const int n = g_->n();
        McpState merged{std::vector<std::int32_t>(n, 0)};
        for (int k = 0; k < n; ++k) {
            bool pos = true, neg = true;
            std::int64_t mag = std::abs(std::int64_t(group[0]->sigma[k]));
            for (const State* s : group) {
                const std::int32_t x = s->sigma[k];
                if (x > 0) neg = false;
                if (x < 0) pos = false;
                mag = std::min<std::int64_t>(mag, std::abs(std::int64_t(x)));
            }
            if (pos)
                merged.sigma[k] = std::int32_t(mag);
            else if (neg)
                merged.sigma[k] = std::int32_t(-mag);
            // else sign conflict: stays 0
        }
        std::vector<Value> corrections(group.size(), 0);
        for (std::size_t i = 0; i < group.size(); ++i) {
            Value c = 0;
            for (int k = 0; k < n; ++k)
                c += std::abs(std::int64_t(group[i]->sigma[k])) - std::abs(std::int64_t(merged.sigma[k]));
            corrections[i] = c;
        }
        return {std::move(merged), std::move(corrections)};
    }

    std::uint64_t state_hash(const State& s) const {
        return hash_range(s.sigma.begin(), s.sigma.end());
    }

private:
    const Graph* g_;
};

}  // namespace ddopt
