#pragma once

#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ddopt/mcp_model.hpp"
#include "ddopt/misp_model.hpp"
#include "ddopt/model_io.hpp"
#include "ddopt/qnet.hpp"
#include "ddopt/rlenv.hpp"

namespace ddopt {

// ---------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------

struct EpsSchedule {
    double start = 1.0;
    double end = 0.05;
    double fraction = 0.5;  // share of the episode budget spent decaying
};

inline double epsilon_at(const EpsSchedule& s, int episode, int total_episodes) {
    const double span = std::max(1.0, s.fraction * double(total_episodes));
    const double t = std::min(1.0, double(episode) / span);
    return s.start + (s.end - s.start) * t;
}

struct TrainConfig {
    Problem problem = Problem::misp;
    Sense sense = Sense::ub;
    int episodes = 2000;  // K
    int batch_size = 32;  // N
    EpsSchedule eps;
    double rho = 1.0;  // reward scale
    double alpha = 1e-3;
    double gamma = 1.0;
    int capacity = 10000;
    int width = 2;  // diagram width during training
    int train_size = 100;
    int refresh_every = 500;
    int val_size = 20;
    int val_every = 100;
    // Desk-scale network: 32 dimensions trains a 2000-episode run in minutes
    // on one core. The architecture default of 64 (QParams) suits full-scale
    // runs; pass --embed-dim to override.
    int embed_dim = 32;
    int depth = 4;
    double weight_scale = 1.0;  // edge-weight input scale (0.01 for mcp)
    // instance distribution (used by the default provider)
    int n_min = 20, n_max = 30;
    int nu = 4;
    int w_low = 1, w_high = 1;
    std::uint64_t seed = 0;
};

inline void validate(const TrainConfig& c) {
    if (c.episodes < 1) throw ConfigError("episodes must be >= 1");
    if (c.batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (c.capacity < c.batch_size) throw ConfigError("replay capacity must be >= batch size");
    if (c.eps.start < c.eps.end || c.eps.end < 0 || c.eps.start > 1)
        throw ConfigError("epsilon schedule must satisfy 0 <= end <= start <= 1");
    if (c.width < 1) throw ConfigError("width must be >= 1");
    if (c.train_size < 1) throw ConfigError("training set must not be empty");
    if (c.val_size < 1) throw ConfigError("validation set must not be empty");
    if (c.val_every < 1 || c.refresh_every < 1) throw ConfigError("cadences must be >= 1");
    if (c.embed_dim < 1 || c.depth < 1) throw ConfigError("bad network shape");
    if (c.n_min < 2 || c.n_max < c.n_min) throw ConfigError("bad instance size range");
    if (c.nu < 1 || c.nu >= c.n_min) throw ConfigError("attachment parameter must satisfy 1 <= nu < n_min");
    if (c.weight_scale <= 0) throw ConfigError("weight scale must be positive");
    if (c.rho == 0) throw ConfigError("reward scale must be nonzero");
}

inline std::string config_to_string(const TrainConfig& c) {
    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "problem=%s\nsense=%s\nepisodes=%d\nbatch_size=%d\neps_start=%.10g\n"
                  "eps_end=%.10g\neps_fraction=%.10g\nrho=%.10g\nalpha=%.10g\ngamma=%.10g\n"
                  "capacity=%d\nwidth=%d\ntrain_size=%d\nrefresh_every=%d\nval_size=%d\n"
                  "val_every=%d\nembed_dim=%d\ndepth=%d\nweight_scale=%.10g\nn_min=%d\n"
                  "n_max=%d\nnu=%d\nw_low=%d\nw_high=%d\nseed=%llu\n",
                  to_string(c.problem), to_string(c.sense), c.episodes, c.batch_size, c.eps.start,
                  c.eps.end, c.eps.fraction, c.rho, c.alpha, c.gamma, c.capacity, c.width,
                  c.train_size, c.refresh_every, c.val_size, c.val_every, c.embed_dim, c.depth,
                  c.weight_scale, c.n_min, c.n_max, c.nu, c.w_low, c.w_high,
                  static_cast<unsigned long long>(c.seed));
    return buf;
}

// ---------------------------------------------------------------
// Experience replay
// ---------------------------------------------------------------

class ReplayBuffer {
public:
    explicit ReplayBuffer(int capacity) : cap_(capacity) {
        if (capacity < 1) throw ConfigError("replay capacity must be >= 1");
    }

    void push(TransitionSample s) {
        if (int(data_.size()) < cap_) {
            data_.push_back(std::move(s));
        } else {
            data_[head_] = std::move(s);  // overwrite the oldest
            head_ = (head_ + 1) % cap_;
        }
    }

    int size() const { return int(data_.size()); }
    int capacity() const { return cap_; }

    // i = 0 is the oldest sample.
    const TransitionSample& at(int i) const { return data_[(head_ + i) % int(data_.size())]; }

private:
    int cap_;
    int head_ = 0;
    std::vector<TransitionSample> data_;
};

// ---------------------------------------------------------------
// Training
// ---------------------------------------------------------------

struct TrainLogRow {
    int episode;  // 1-based
    double epsilon;
    double mean_loss;
    double episode_return;
    bool has_val = false;
    double val_score = 0.0;
};

inline void write_log(std::ostream& os, const std::vector<TrainLogRow>& log) {
    os << "episode,epsilon,mean_loss,episode_return,val_score\n";
    char buf[256];
    for (const auto& r : log) {
        if (r.has_val)
            std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,%.10g\n", r.episode, r.epsilon,
                          r.mean_loss, r.episode_return, r.val_score);
        else
            std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,\n", r.episode, r.epsilon,
                          r.mean_loss, r.episode_return);
        os << buf;
    }
}

struct TrainResult {
    QParams params;        // validation-selected
    QParams final_params;  // from the last episode
    double best_val_score = 0.0;
    double final_val_score = 0.0;
    long long total_samples = 0;  // transitions pushed to the replay buffer
    long long total_updates = 0;  // optimizer steps taken
    std::vector<TrainLogRow> log;
};

using InstanceProvider = std::function<Graph(std::uint64_t seed)>;

inline InstanceProvider default_provider(const TrainConfig& cfg) {
    return [cfg](std::uint64_t seed) {
        Rng r(seed);
        BaConfig bc;
        bc.n = cfg.n_min + int(r.below(std::uint64_t(cfg.n_max - cfg.n_min) + 1));
        bc.nu = cfg.nu;
        bc.weight_low = cfg.w_low;
        bc.weight_high = cfg.w_high;
        bc.seed = r.next_u64();
        return generate_ba(bc);
    };
}

namespace detail {

// Greedy rollout under fixed parameters; returns the scaled episode return.
template <DpModel Model>
double greedy_return(const QParams& params, const Graph& g, Sense sense, int width, double rho,
                     double wscale) {
    Env<Model> env(g, Model(g), sense, width);
    while (!env.terminal()) env.step(greedy_action(params, g, env.inserted_mask(), wscale));
    const double bound = env.dd().bound();
    return rho * (sense == Sense::ub ? -bound : bound);
}

template <DpModel Model>
TrainResult train_impl(const TrainConfig& cfg, const InstanceProvider& provider,
                       QParams initial_params) {
    Rng loop(derive_seed(cfg.seed, 0x100bULL));
    std::deque<Graph> store;  // all generations; replay references them by id
    std::vector<int> active;  // ids of the current training set

    int generation = 0;
    auto regenerate = [&]() {
        const std::uint64_t gen_seed = derive_seed(cfg.seed, 0x7365740ULL + generation);
        active.clear();
        for (int i = 0; i < cfg.train_size; ++i) {
            store.push_back(provider(derive_seed(gen_seed, i)));
            active.push_back(int(store.size()) - 1);
        }
        ++generation;
    };
    regenerate();

    std::vector<Graph> val_graphs;
    const std::uint64_t val_seed = derive_seed(cfg.seed, 0x76616cULL);
    for (int i = 0; i < cfg.val_size; ++i) val_graphs.push_back(provider(derive_seed(val_seed, i)));

    QParams params = std::move(initial_params);
    AdamState opt(params.count(), cfg.alpha);
    ReplayBuffer buffer(cfg.capacity);

    auto validate_params = [&](const QParams& p) {
        double sum = 0;
        for (const auto& g : val_graphs)
            sum += greedy_return<Model>(p, g, cfg.sense, cfg.width, cfg.rho, cfg.weight_scale);
        return sum / double(val_graphs.size());
    };

    TrainResult result;
    result.params = params;
    result.best_val_score = -std::numeric_limits<double>::infinity();

    std::vector<TdSample> batch(cfg.batch_size);
    QParams grad;

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        if (ep > 0 && ep % cfg.refresh_every == 0) regenerate();
        const double eps = epsilon_at(cfg.eps, ep, cfg.episodes);

        const int gid = active[loop.below(active.size())];
        const Graph& g = store[gid];
        Env<Model> env(g, Model(g), cfg.sense, cfg.width);

        double loss_sum = 0;
        int loss_count = 0;
        while (!env.terminal()) {
            int action;
            if (loop.unit() < eps) {
                auto legal = env.actions();
                action = legal[loop.below(legal.size())];
            } else {
                action = greedy_action(params, g, env.inserted_mask(), cfg.weight_scale);
            }

            TransitionSample sample;
            sample.graph_id = gid;
            sample.inserted_before = env.inserted_seq();
            sample.action = action;
            const auto out = env.step(action);
            sample.reward = cfg.rho * out.reward;
            sample.terminal = out.terminal;
            buffer.push(std::move(sample));
            ++result.total_samples;

            if (buffer.size() >= cfg.batch_size) {
                for (int j = 0; j < cfg.batch_size; ++j) {
                    const auto& s = buffer.at(int(loop.below(buffer.size())));
                    TdSample& t = batch[j];
                    t.g = &store[s.graph_id];
                    t.inserted = Bitset(t.g->n());
                    for (int v : s.inserted_before) t.inserted.set(v);
                    t.action = s.action;
                    t.reward = s.reward;
                    t.terminal = s.terminal;
                    t.weight_scale = cfg.weight_scale;
                }
                loss_sum += td_loss_grad(params, batch, cfg.gamma, grad);
                adam_step(params, opt, grad);
                ++loss_count;
                ++result.total_updates;
            }
        }

        TrainLogRow row;
        row.episode = ep + 1;
        row.epsilon = eps;
        row.mean_loss = loss_count ? loss_sum / loss_count : 0.0;
        const double bound = env.dd().bound();
        row.episode_return = cfg.rho * (cfg.sense == Sense::ub ? -bound : bound);

        if ((ep + 1) % cfg.val_every == 0 || ep + 1 == cfg.episodes) {
            const double score = validate_params(params);
            row.has_val = true;
            row.val_score = score;
            if (score > result.best_val_score) {
                result.best_val_score = score;
                result.params = params;
            }
            if (ep + 1 == cfg.episodes) result.final_val_score = score;
        }
        result.log.push_back(row);
    }

    result.final_params = std::move(params);
    return result;
}

}  // namespace detail

// Algorithm: per episode, draw a training graph, roll out the adaptive
// eps-greedy policy, store scaled rewards in the replay buffer, and take one
// mini-batch optimizer step per environment step once the buffer is warm.
// The training set is regenerated every refresh_every episodes; the returned
// parameters are the best scorer on the fixed validation set. Deterministic
// given cfg.seed.
inline TrainResult train(const TrainConfig& cfg, InstanceProvider provider = nullptr,
                         const LoadedModel* init = nullptr, bool allow_sense_change = false) {
    validate(cfg);
    if (!provider) provider = default_provider(cfg);

    QParams initial;
    if (init) {
        if (init->meta.problem != cfg.problem)
            throw ConfigError("initial model was trained for a different problem");
        if (init->meta.sense != cfg.sense && !allow_sense_change)
            throw ConfigError(
                "initial model was trained for the other bound sense; pass the explicit override "
                "to fine-tune across senses");
        if (init->params.p != cfg.embed_dim || init->params.depth != cfg.depth)
            throw ConfigError("initial model shape does not match embed_dim/depth");
        initial = init->params;
    } else {
        initial = init_qparams(cfg.embed_dim, cfg.depth, derive_seed(cfg.seed, 0x696e6974ULL));
    }

    if (cfg.problem == Problem::misp)
        return detail::train_impl<MispModel>(cfg, provider, std::move(initial));
    return detail::train_impl<McpModel>(cfg, provider, std::move(initial));
}

// ---------------------------------------------------------------
// Checkpoints (model file format from model_io.hpp, config embedded)
// ---------------------------------------------------------------

inline void checkpoint_save(const std::string& path, const QParams& params,
                            const TrainConfig& cfg) {
    ModelMeta meta;
    meta.problem = cfg.problem;
    meta.sense = cfg.sense;
    meta.train_width = cfg.width;
    meta.weight_scale = cfg.weight_scale;
    meta.provenance = config_to_string(cfg);
    save_model(path, params, meta);
}

inline LoadedModel checkpoint_load(const std::string& path) { return load_model(path); }

}  // namespace ddopt
