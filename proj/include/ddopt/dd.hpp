#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ddopt/dp_model.hpp"

namespace ddopt {

enum class DdMode { exact, relaxed, restricted };

inline const char* to_string(DdMode m) {
    switch (m) {
        case DdMode::exact: return "exact";
        case DdMode::relaxed: return "relaxed";
        default: return "restricted";
    }
}

// Layer-by-layer decision diagram under construction. insert() is the
// variable-insertion operator: it expands the last layer, combines
// equal-state nodes keeping the larger value, then enforces the width cap
// (relaxed: merge the worst nodes into one; restricted: drop them).
template <DpModel Model>
class DecisionDiagram {
public:
    using State = typename Model::State;

    struct Arc {
        std::int32_t parent;  // index into the previous layer
        std::int8_t decision;
        Value cost;
    };
    struct Node {
        State state;
        Value value;  // longest path from the root, in raw cost units
        std::vector<Arc> in;
        std::uint64_t hash;
    };

    DecisionDiagram(Model model, const Graph& g, DdMode mode, int width_cap = 0)
        : model_(std::move(model)), g_(&g), mode_(mode), width_cap_(width_cap), inserted_(g.n()) {
        if (mode != DdMode::exact && width_cap < 1)
            throw ConfigError("width cap must be >= 1 for " + std::string(to_string(mode)) + " mode");
        layers_.push_back({Node{model_.root(), 0, {}, 0}});
        layers_[0][0].hash = model_.state_hash(layers_[0][0].state);
    }

    // Insert the next variable. Returns the change in the running bound.
    Value insert(int v) {
        if (v < 0 || v >= g_->n()) throw ConfigError("vertex " + std::to_string(v) + " out of range");
        if (inserted_.test(v))
            throw ConfigError("vertex " + std::to_string(v) + " already inserted");

        const LayerContext ctx{g_, &ordering_, &inserted_};
        const auto& cur = layers_.back();
        std::vector<Node> next;
        next.reserve(cur.size() * 2);
        std::unordered_map<std::uint64_t, std::vector<int>> by_hash;
        by_hash.reserve(cur.size() * 2);

        for (int i = 0; i < int(cur.size()); ++i) {
            for (int d = 0; d <= 1; ++d) {
                auto tr = model_.transition(cur[i].state, v, d, ctx);
                if (!tr) continue;
                const std::uint64_t h = model_.state_hash(tr->state);
                int idx = -1;
                auto& bucket = by_hash[h];
                for (int j : bucket)
                    if (next[j].state == tr->state) {
                        idx = j;
                        break;
                    }
                if (idx < 0) {
                    idx = int(next.size());
                    next.push_back(Node{std::move(tr->state), std::numeric_limits<Value>::min(), {}, h});
                    bucket.push_back(idx);
                }
                next[idx].value = std::max(next[idx].value, cur[i].value + tr->cost);
                next[idx].in.push_back(Arc{i, std::int8_t(d), tr->cost});
            }
        }

        ordering_.push_back(v);
        inserted_.set(v);
        if (mode_ != DdMode::exact && int(next.size()) > width_cap_) enforce_width(next);
        layers_.push_back(std::move(next));

        Value nb = 0;
        for (const auto& node : layers_.back()) nb = std::max(nb, node.value);
        const Value delta = nb - bound_;
        bound_ = nb;
        return delta;
    }

    bool complete() const { return int(ordering_.size()) == g_->n(); }
    int vars_inserted() const { return int(ordering_.size()); }

    Value bound_raw() const { return bound_; }
    double bound() const { return double(bound_) / double(Model::cost_denominator); }

    DdMode mode() const { return mode_; }
    int width_cap() const { return width_cap_; }
    const Graph& graph() const { return *g_; }
    const Model& model() const { return model_; }
    const std::vector<int>& ordering() const { return ordering_; }
    const Bitset& inserted_mask() const { return inserted_; }
    const std::vector<std::vector<Node>>& layers() const { return layers_; }

    int width() const {
        std::size_t w = 0;
        for (const auto& l : layers_) w = std::max(w, l.size());
        return int(w);
    }

private:
    // Rank nodes best-first (value, then state hash, then insertion order)
    // and merge or delete from the bottom until the cap holds.
    void enforce_width(std::vector<Node>& layer) {
        std::vector<int> order(layer.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (layer[a].value != layer[b].value) return layer[a].value > layer[b].value;
            if (layer[a].hash != layer[b].hash) return layer[a].hash < layer[b].hash;
            return a < b;
        });

        std::vector<Node> kept;
        if (mode_ == DdMode::restricted) {
            kept.reserve(width_cap_);
            for (int i = 0; i < width_cap_; ++i) kept.push_back(std::move(layer[order[i]]));
            layer = std::move(kept);
            return;
        }

        kept.reserve(width_cap_);
        for (int i = 0; i < width_cap_ - 1; ++i) kept.push_back(std::move(layer[order[i]]));
        std::vector<const State*> victims;
        victims.reserve(layer.size() - kept.size());
        for (std::size_t i = kept.size(); i < order.size(); ++i)
            victims.push_back(&layer[order[i]].state);

        const LayerContext ctx{g_, &ordering_, &inserted_};
        auto mr = model_.merge(victims, ctx);

        Node merged{std::move(mr.state), std::numeric_limits<Value>::min(), {}, 0};
        merged.hash = model_.state_hash(merged.state);
        for (std::size_t i = 0; i < victims.size(); ++i) {
            Node& victim = layer[order[kept.size() + i]];
            const Value corr = mr.corrections[i];
            merged.value = std::max(merged.value, victim.value + corr);
            for (const Arc& a : victim.in) merged.in.push_back(Arc{a.parent, a.decision, a.cost + corr});
        }

        // The merged state may coincide with a kept node; fold into it so a
        // layer never holds two nodes with equal states.
        for (Node& k : kept) {
            if (k.hash == merged.hash && k.state == merged.state) {
                k.value = std::max(k.value, merged.value);
                k.in.insert(k.in.end(), merged.in.begin(), merged.in.end());
                layer = std::move(kept);
                return;
            }
        }
        kept.push_back(std::move(merged));
        layer = std::move(kept);
    }

    Model model_;
    const Graph* g_;
    DdMode mode_;
    int width_cap_;
    std::vector<std::vector<Node>> layers_;
    std::vector<int> ordering_;
    Bitset inserted_;
    Value bound_ = 0;
};

// ---------------------------------------------------------------
// Compilation drivers
// ---------------------------------------------------------------

template <DpModel Model>
DecisionDiagram<Model> compile(Model model, const Graph& g, const std::vector<int>& ordering,
                               DdMode mode, int width_cap = 0) {
    if (int(ordering.size()) != g.n()) throw ConfigError("ordering must be a permutation of V");
    DecisionDiagram<Model> dd(std::move(model), g, mode, width_cap);
    for (int v : ordering) dd.insert(v);
    return dd;
}

// Dynamic-ordering compilation: the callback picks the next vertex from the
// remaining ones given the diagram built so far.
template <DpModel Model, typename NextVertex>
DecisionDiagram<Model> compile_with_policy(Model model, const Graph& g, NextVertex&& next_vertex,
                                           DdMode mode, int width_cap = 0) {
    DecisionDiagram<Model> dd(std::move(model), g, mode, width_cap);
    std::vector<int> remaining(g.n());
    for (int v = 0; v < g.n(); ++v) remaining[v] = v;
    while (!remaining.empty()) {
        const int v = next_vertex(dd, remaining);
        auto it = std::find(remaining.begin(), remaining.end(), v);
        if (it == remaining.end())
            throw ConfigError("policy returned vertex " + std::to_string(v) +
                              " which is not available");
        remaining.erase(it);
        dd.insert(v);
    }
    return dd;
}

// ---------------------------------------------------------------
// Longest path extraction
// ---------------------------------------------------------------

struct LongestPath {
    Value value_raw;
    double value;
    std::vector<std::int8_t> decisions;  // aligned with dd.ordering()
};

template <DpModel Model>
LongestPath longest_path(const DecisionDiagram<Model>& dd) {
    if (!dd.complete()) throw ConfigError("longest_path requires a complete diagram");
    const auto& layers = dd.layers();

    int idx = 0;
    for (int i = 1; i < int(layers.back().size()); ++i)
        if (layers.back()[i].value > layers.back()[idx].value) idx = i;

    std::vector<std::int8_t> decisions(layers.size() - 1, 0);
    for (int l = int(layers.size()) - 1; l > 0; --l) {
        const auto& node = layers[l][idx];
        const typename DecisionDiagram<Model>::Arc* best = nullptr;
        for (const auto& a : node.in) {
            if (!best || layers[l - 1][a.parent].value + a.cost >
                             layers[l - 1][best->parent].value + best->cost)
                best = &a;
        }
        decisions[l - 1] = best->decision;
        idx = best->parent;
    }
    return LongestPath{dd.bound_raw(), dd.bound(), std::move(decisions)};
}

// Vertices assigned decision 1 along a longest path.
inline std::vector<int> decisions_to_selection(const std::vector<int>& ordering,
                                               const std::vector<std::int8_t>& decisions) {
    std::vector<int> out;
    for (std::size_t i = 0; i < decisions.size(); ++i)
        if (decisions[i]) out.push_back(ordering[i]);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------
// DOT dump (debugging aid)
// ---------------------------------------------------------------

template <DpModel Model>
void to_dot(const DecisionDiagram<Model>& dd, std::ostream& os) {
    auto disp = [](Value raw) {
        const Value den = Model::cost_denominator;
        if (raw % den == 0) return std::to_string(raw / den);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", double(raw) / double(den));
        return std::string(buf);
    };
    os << "digraph dd {\n  rankdir=TB;\n  node [shape=circle];\n";
    const auto& layers = dd.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t i = 0; i < layers[l].size(); ++i) {
            os << "  n" << l << "_" << i << " [label=\"" << disp(layers[l][i].value) << "\"];\n";
            for (const auto& a : layers[l][i].in) {
                os << "  n" << l - 1 << "_" << a.parent << " -> n" << l << "_" << i << " [label=\""
                   << int(a.decision) << "/" << disp(a.cost) << "\"";
                if (a.decision == 0) os << " style=dashed";
                os << "];\n";
            }
        }
    }
    os << "}\n";
}

}  // namespace ddopt
