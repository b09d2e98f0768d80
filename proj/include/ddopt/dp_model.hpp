#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <vector>

#include "ddopt/common.hpp"
#include "ddopt/graph.hpp"

namespace ddopt {

// Arc values are int64 in units of 1 / Model::cost_denominator, so all
// bound arithmetic stays exact even when merge corrections are
// half-integral (max-cut relaxations produce those).
using Value = std::int64_t;

// Shared per-layer data handed to model transitions: the compiler fills
// in which vertices were inserted before the layer's variable.
struct LayerContext {
    const Graph* g = nullptr;
    const std::vector<int>* inserted_before = nullptr;  // in insertion order
    const Bitset* placed = nullptr;                     // same set, as a mask
};

template <typename State>
struct TransitionResult {
    State state;
    Value cost;
};

template <typename State>
struct MergeResult {
    State state;
    std::vector<Value> corrections;  // one per merged node, aligned with input order
};

// A problem-specific dynamic program the generic DD compiler consumes.
template <typename M>
concept DpModel = requires(const M m, const typename M::State s,
                           const std::vector<const typename M::State*> group,
                           const LayerContext& ctx, int v, int d) {
    typename M::State;
    { M::cost_denominator } -> std::convertible_to<Value>;
    { m.root() } -> std::same_as<typename M::State>;
    { m.transition(s, v, d, ctx) } -> std::same_as<std::optional<TransitionResult<typename M::State>>>;
    { m.merge(group, ctx) } -> std::same_as<MergeResult<typename M::State>>;
    { m.state_hash(s) } -> std::same_as<std::uint64_t>;
};

}  // namespace ddopt
