#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "ddopt/mcp_model.hpp"
#include "ddopt/misp_model.hpp"
#include "ddopt/oracles.hpp"
#include "ddopt/ordering.hpp"
#include "ddopt/qnet.hpp"
#include "ddopt/rlenv.hpp"

namespace ddopt {

// |bound - optimum| / optimum; both problems have positive optima on
// generated instances.
inline double optimality_gap(double bound, double optimum) {
    if (optimum <= 0) throw ConfigError("optimality gap needs a positive optimum");
    return std::abs(bound - optimum) / optimum;
}

// ---------------------------------------------------------------
// Method evaluation
// ---------------------------------------------------------------

struct EvalInstance {
    std::string id;
    Graph graph;
};

struct EvalRow {
    std::string instance;
    std::string method;  // rand (trial mean), rand_best, rand_worst, mpd, ...
    Sense sense;
    int width;
    double bound;
    double optimum;  // NaN when the oracle was skipped
    double gap;      // NaN when no optimum
    double ms;       // diagram compilation time only
};

struct EvalOptions {
    Sense sense = Sense::ub;
    int width = 10;
    Problem problem = Problem::misp;
    double weight_scale = 1.0;       // for the learned policy's network inputs
    const QParams* model = nullptr;  // required for OrderingKind::learned
    int rand_trials = 100;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool with_optimum = true;
};

namespace detail {

template <DpModel Model>
double timed_bound(const Graph& g, const std::vector<int>& ordering, DdMode mode, int width,
                   double& ms) {
    const auto t0 = std::chrono::steady_clock::now();
    auto dd = compile(Model(g), g, ordering, mode, width);
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return dd.bound();
}

template <DpModel Model>
double policy_bound(const Graph& g, const QParams& params, double wscale, DdMode mode, int width,
                    double& ms) {
    const auto t0 = std::chrono::steady_clock::now();
    auto dd = compile_with_policy(
        Model(g), g,
        [&](const DecisionDiagram<Model>& d, const std::vector<int>&) {
            return greedy_action(params, g, d.inserted_mask(), wscale);
        },
        mode, width);
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return dd.bound();
}

template <DpModel Model>
double min_heuristic_bound(const Graph& g, DdMode mode, int width, double& ms) {
    if constexpr (std::is_same_v<Model, MispModel>) {
        const auto t0 = std::chrono::steady_clock::now();
        auto dd = compile_with_policy(
            Model(g), g,
            [](const DecisionDiagram<MispModel>& d, const std::vector<int>& rem) {
                return min_states_next(d, rem);
            },
            mode, width);
        ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                 .count();
        return dd.bound();
    } else {
        throw ConfigError("the min heuristic is defined for misp only");
    }
}

}  // namespace detail

// Compile one (instance, method) cell. RAND is expanded by the caller.
template <DpModel Model>
double evaluate_cell(const Graph& g, OrderingKind kind, const EvalOptions& opt,
                     std::uint64_t rand_seed, double& ms) {
    const DdMode mode = opt.sense == Sense::ub ? DdMode::relaxed : DdMode::restricted;
    switch (kind) {
        case OrderingKind::rand:
            return detail::timed_bound<Model>(g, rand_ordering(g, rand_seed), mode, opt.width, ms);
        case OrderingKind::mpd:
            return detail::timed_bound<Model>(g, mpd_ordering(g), mode, opt.width, ms);
        case OrderingKind::deg:
            return detail::timed_bound<Model>(g, deg_ordering(g), mode, opt.width, ms);
        case OrderingKind::maxw:
            return detail::timed_bound<Model>(g, maxweight_ordering(g), mode, opt.width, ms);
        case OrderingKind::min:
            return detail::min_heuristic_bound<Model>(g, mode, opt.width, ms);
        case OrderingKind::learned:
            if (!opt.model) throw ConfigError("the learned ordering needs a model");
            return detail::policy_bound<Model>(g, *opt.model, opt.weight_scale, mode, opt.width,
                                               ms);
    }
    throw ConfigError("unreachable ordering kind");
}

namespace detail {

template <DpModel Model>
std::vector<EvalRow> evaluate_methods_impl(const std::vector<EvalInstance>& instances,
                                           const std::vector<OrderingKind>& methods,
                                           const EvalOptions& opt) {
    struct Task {
        int instance;
        OrderingKind kind;
    };
    std::vector<Task> tasks;
    for (int i = 0; i < int(instances.size()); ++i)
        for (auto k : methods) tasks.push_back({i, k});

    std::vector<std::vector<EvalRow>> results(tasks.size());

    auto optimum_of = [&](const Graph& g) {
        if (!opt.with_optimum) return std::numeric_limits<double>::quiet_NaN();
        if constexpr (std::is_same_v<Model, MispModel>)
            return double(brute_force_misp(g));
        else
            return double(brute_force_mcp(g));
    };

    auto run_task = [&](int ti) {
        const auto& inst = instances[tasks[ti].instance];
        const OrderingKind kind = tasks[ti].kind;
        const double optimum = optimum_of(inst.graph);
        auto make_row = [&](const std::string& method, double bound, double ms) {
            EvalRow r;
            r.instance = inst.id;
            r.method = method;
            r.sense = opt.sense;
            r.width = opt.width;
            r.bound = bound;
            r.optimum = optimum;
            r.gap = std::isnan(optimum) ? optimum : optimality_gap(bound, optimum);
            r.ms = ms;
            return r;
        };

        if (kind == OrderingKind::rand) {
            // trial statistics: mean gap plus the best and worst trial
            double ms_total = 0, bound_sum = 0, gap_sum = 0;
            double best_gap = 0, worst_gap = 0, best_bound = 0, worst_bound = 0;
            for (int t = 0; t < opt.rand_trials; ++t) {
                double ms = 0;
                const std::uint64_t s =
                    derive_seed(opt.seed, std::uint64_t(tasks[ti].instance) * 100003 + t);
                const double b = evaluate_cell<Model>(inst.graph, kind, opt, s, ms);
                ms_total += ms;
                bound_sum += b;
                const double gap = std::isnan(optimum) ? 0.0 : optimality_gap(b, optimum);
                gap_sum += gap;
                if (t == 0 || gap < best_gap) {
                    best_gap = gap;
                    best_bound = b;
                }
                if (t == 0 || gap > worst_gap) {
                    worst_gap = gap;
                    worst_bound = b;
                }
            }
            const double inv = 1.0 / double(opt.rand_trials);
            EvalRow mean = make_row("rand", bound_sum * inv, ms_total * inv);
            if (!std::isnan(optimum)) mean.gap = gap_sum * inv;
            EvalRow best = make_row("rand_best", best_bound, ms_total * inv);
            EvalRow worst = make_row("rand_worst", worst_bound, ms_total * inv);
            results[ti] = {mean, best, worst};
        } else {
            double ms = 0;
            const double b = evaluate_cell<Model>(inst.graph, kind, opt, 0, ms);
            results[ti] = {make_row(to_string(kind), b, ms)};
        }
    };

    if (opt.jobs <= 1) {
        for (int t = 0; t < int(tasks.size()); ++t) run_task(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < opt.jobs; ++w)
            pool.emplace_back([&]() {
                for (int t = next.fetch_add(1); t < int(tasks.size()); t = next.fetch_add(1))
                    run_task(t);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<EvalRow> out;
    for (auto& rs : results)
        for (auto& r : rs) out.push_back(std::move(r));
    return out;
}

}  // namespace detail

// Evaluate each (instance, method) pair: compile the diagram, fetch the
// oracle optimum when available, and report bounds, gaps and compile times.
// RAND reports mean/best/worst over opt.rand_trials seeded trials. Rows come
// back grouped by instance in input order, methods in the requested order.
inline std::vector<EvalRow> evaluate_methods(const std::vector<EvalInstance>& instances,
                                             const std::vector<OrderingKind>& methods,
                                             const EvalOptions& opt) {
    if (instances.empty()) throw ConfigError("no instances to evaluate");
    if (methods.empty()) throw ConfigError("no methods to evaluate");
    for (auto k : methods)
        if (k == OrderingKind::learned && !opt.model)
            throw ConfigError("the learned ordering needs a model");
    if (opt.problem == Problem::misp)
        return detail::evaluate_methods_impl<MispModel>(instances, methods, opt);
    return detail::evaluate_methods_impl<McpModel>(instances, methods, opt);
}

inline void write_eval_csv(std::ostream& os, const std::vector<EvalRow>& rows) {
    os << "instance,method,sense,width,bound,optimum,gap,ms\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,%.10g,%.10g,%.10g,%.6g\n", r.instance.c_str(),
                      r.method.c_str(), to_string(r.sense), r.width, r.bound, r.optimum, r.gap,
                      r.ms);
        os << buf;
    }
}

// ---------------------------------------------------------------
// Dolan-More performance profiles over optimality gaps
// ---------------------------------------------------------------

struct ProfilePoint {
    std::string method;
    double tau;
    double fraction;
};

// gap_matrix[i][m]: gap of method m on instance i. The delta shift keeps
// all-zero rows (every method optimal) well defined: they tie at ratio 1.
inline std::vector<ProfilePoint> performance_profile(
    const std::vector<std::vector<double>>& gap_matrix, const std::vector<std::string>& methods,
    double delta = 1e-9) {
    if (gap_matrix.empty() || methods.empty()) throw ConfigError("empty gap matrix");
    const int m = int(methods.size());
    for (const auto& row : gap_matrix)
        if (int(row.size()) != m) throw ConfigError("ragged gap matrix");

    std::vector<std::vector<double>> ratios(gap_matrix.size(), std::vector<double>(m));
    std::set<double> taus;
    for (std::size_t i = 0; i < gap_matrix.size(); ++i) {
        double best = gap_matrix[i][0];
        for (double gap : gap_matrix[i]) best = std::min(best, gap);
        for (int j = 0; j < m; ++j) {
            ratios[i][j] = (gap_matrix[i][j] + delta) / (best + delta);
            taus.insert(ratios[i][j]);
        }
    }

    std::vector<ProfilePoint> out;
    for (int j = 0; j < m; ++j) {
        for (double tau : taus) {
            int count = 0;
            for (std::size_t i = 0; i < ratios.size(); ++i)
                if (ratios[i][j] <= tau) ++count;
            out.push_back({methods[j], tau, double(count) / double(ratios.size())});
        }
    }
    return out;
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfilePoint>& points) {
    os << "method,tau,fraction\n";
    char buf[256];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g\n", p.method.c_str(), p.tau, p.fraction);
        os << buf;
    }
}

}  // namespace ddopt
