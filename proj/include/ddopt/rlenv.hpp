#pragma once

#include <vector>

#include "ddopt/dd.hpp"

namespace ddopt {

// One replayed transition. The successor state is reconstructible: its
// inserted sequence is inserted_before plus the action.
struct TransitionSample {
    int graph_id = -1;
    std::vector<int> inserted_before;
    int action = -1;
    double reward = 0.0;  // already reward-scaled
    bool terminal = false;
};

struct StepOutcome {
    Value reward_raw;  // integer half-unit reward, exact
    double reward;     // reward_raw / cost_denominator
    bool terminal;
};

// The variable-ordering MDP: state = (inserted sequence, partial diagram),
// actions = uninserted vertices, transition = the diagram's insert operator.
// Bound-sense ub builds relaxed diagrams and pays the negated bound
// increment per step (tight upper bounds earn high return); lb builds
// restricted diagrams and earns the increment. Either way the episode
// return telescopes to -(relaxed bound) resp. +(restricted bound).
template <DpModel Model>
class Env {
public:
    Env(const Graph& g, Model model, Sense sense, int width)
        : g_(&g),
          model_(std::move(model)),
          sense_(sense),
          width_(width),
          dd_(model_, g, sense == Sense::ub ? DdMode::relaxed : DdMode::restricted, width) {}

    void reset() {
        dd_ = DecisionDiagram<Model>(model_, *g_,
                                     sense_ == Sense::ub ? DdMode::relaxed : DdMode::restricted,
                                     width_);
    }

    const Graph& graph() const { return *g_; }
    Sense sense() const { return sense_; }
    const DecisionDiagram<Model>& dd() const { return dd_; }
    const std::vector<int>& inserted_seq() const { return dd_.ordering(); }
    const Bitset& inserted_mask() const { return dd_.inserted_mask(); }
    bool terminal() const { return dd_.complete(); }

    std::vector<int> actions() const {
        std::vector<int> out;
        out.reserve(g_->n() - dd_.vars_inserted());
        for (int v = 0; v < g_->n(); ++v)
            if (!dd_.inserted_mask().test(v)) out.push_back(v);
        return out;
    }

    StepOutcome step(int action) {
        const Value delta = dd_.insert(action);  // throws if already inserted
        const Value raw = sense_ == Sense::ub ? -delta : delta;
        return StepOutcome{raw, double(raw) / double(Model::cost_denominator), dd_.complete()};
    }

private:
    const Graph* g_;
    Model model_;
    Sense sense_;
    int width_;
    DecisionDiagram<Model> dd_;
};

template <DpModel Model>
Env<Model> env_reset(const Graph& g, Model model, Sense sense, int width) {
    return Env<Model>(g, std::move(model), sense, width);
}

}  // namespace ddopt
