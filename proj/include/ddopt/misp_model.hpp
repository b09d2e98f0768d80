#pragma once

#include <optional>
#include <vector>

#include "ddopt/dp_model.hpp"

namespace ddopt {

// Vertices that may still join the independent set.
struct MispState {
    Bitset eligible;
    bool operator==(const MispState&) const = default;
};

// Maximum independent set, cardinality objective: selecting a vertex
// (decision 1) costs 1 and knocks out the vertex and its neighbors.
class MispModel {
public:
    using State = MispState;
    static constexpr Value cost_denominator = 1;

    explicit MispModel(const Graph& g) : g_(&g) {}

    State root() const {
        MispState s{Bitset(g_->n())};
        s.eligible.set_all();
        return s;
    }

    std::optional<TransitionResult<State>> transition(const State& s, int v, int d,
                                                      const LayerContext&) const {
        if (d == 1) {
            if (!s.eligible.test(v)) return std::nullopt;
            MispState next{s.eligible};
            next.eligible.reset(v);
            next.eligible.subtract(g_->neighbor_mask(v));
            return TransitionResult<State>{std::move(next), 1};
        }
        MispState next{s.eligible};
        next.eligible.reset(v);
        return TransitionResult<State>{std::move(next), 0};
    }

    // Union of eligible sets; no solution is lost, no arc correction needed.
    MergeResult<State> merge(const std::vector<const State*>& group, const LayerContext&) const {
        MispState merged{Bitset(g_->n())};
        for (const State* s : group) merged.eligible |= s->eligible;
        return {std::move(merged), std::vector<Value>(group.size(), 0)};
    }

    std::uint64_t state_hash(const State& s) const { return s.eligible.hash(); }

private:
    const Graph* g_;
};

}  // namespace ddopt
