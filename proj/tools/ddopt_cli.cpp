// Command-line driver: instance generation, training, bounding, method
// evaluation and performance profiles. Exit codes: 0 ok, 2 usage, 1 runtime.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ddopt/evaluator.hpp"
#include "ddopt/trainer.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace ddopt;

namespace {

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << content;
    if (!f) throw IoError("write failed: " + path);
}

// Every file-producing command persists its resolved configuration in
// CLI11's config format, so `<subcommand> --config <file>` reproduces the
// run (command-line flags still override file values).
void write_config(const std::string& next_to, const CLI::App* sub) {
    write_text(next_to + ".config",
               "[" + sub->get_name() + "]\n" + sub->config_to_str(true, true));
}

std::vector<OrderingKind> parse_methods(const std::string& csv) {
    std::vector<OrderingKind> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(ordering_from_string(item));
    }
    if (out.empty()) throw ConfigError("no methods given");
    return out;
}

std::string format_bound(double b) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", b);
    return buf;
}

// ---------------------------------------------------------------
// generate
// ---------------------------------------------------------------

struct GenerateArgs {
    std::string problem = "misp";
    int n = 25;
    int nu = 4;
    int count = 10;
    std::uint64_t seed = 0;
    int wlow = -1, whigh = -1;  // -1: problem default
    std::string out_dir = ".";
};

int cmd_generate(const GenerateArgs& a) {
    const Problem problem = problem_from_string(a.problem);
    const int wlow = a.wlow >= 0 ? a.wlow : 1;
    const int whigh = a.whigh >= 0 ? a.whigh : (problem == Problem::misp ? 1 : 10);

    fs::create_directories(a.out_dir);
    json manifest;
    manifest["command"] = "generate";
    manifest["problem"] = a.problem;
    manifest["n"] = a.n;
    manifest["nu"] = a.nu;
    manifest["count"] = a.count;
    manifest["seed"] = a.seed;
    manifest["weight_low"] = wlow;
    manifest["weight_high"] = whigh;
    manifest["files"] = json::array();

    for (int i = 0; i < a.count; ++i) {
        BaConfig bc{a.n, a.nu, wlow, whigh, derive_seed(a.seed, std::uint64_t(i))};
        Graph g = generate_ba(bc);
        const std::string name = "inst_" + std::to_string(a.seed) + "_" + std::to_string(i) + ".gr";
        save_instance(g, (fs::path(a.out_dir) / name).string());
        manifest["files"].push_back(name);
    }
    write_text((fs::path(a.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    std::ostringstream cfg;
    cfg << "[generate]\nproblem=\"" << a.problem << "\"\nn=" << a.n << "\nnu=" << a.nu << "\ncount="
        << a.count << "\nseed=" << a.seed << "\nwlow=" << wlow << "\nwhigh=" << whigh
        << "\nout=\"" << a.out_dir << "\"\n";
    write_text((fs::path(a.out_dir) / "generate.config").string(), cfg.str());
    std::cout << "wrote " << a.count << " instances to " << a.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------
// train
// ---------------------------------------------------------------

struct TrainArgs {
    TrainConfig cfg;
    std::string problem = "misp";
    std::string sense = "ub";
    std::string out = "model.bin";
    std::string log;
    std::string init_model;
    bool allow_sense_change = false;
    bool rho_set = false, scale_set = false, wlow_set = false, whigh_set = false;
};

std::string train_resolved_config(const TrainConfig& c, const TrainArgs& a) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << "[train]\n"
       << "problem=\"" << to_string(c.problem) << "\"\n"
       << "sense=\"" << to_string(c.sense) << "\"\n"
       << "episodes=" << c.episodes << "\n"
       << "batch=" << c.batch_size << "\n"
       << "eps-start=" << num(c.eps.start) << "\n"
       << "eps-end=" << num(c.eps.end) << "\n"
       << "eps-fraction=" << num(c.eps.fraction) << "\n"
       << "rho=" << num(c.rho) << "\n"
       << "alpha=" << num(c.alpha) << "\n"
       << "gamma=" << num(c.gamma) << "\n"
       << "capacity=" << c.capacity << "\n"
       << "width=" << c.width << "\n"
       << "train-size=" << c.train_size << "\n"
       << "refresh-every=" << c.refresh_every << "\n"
       << "val-size=" << c.val_size << "\n"
       << "val-every=" << c.val_every << "\n"
       << "embed-dim=" << c.embed_dim << "\n"
       << "depth=" << c.depth << "\n"
       << "weight-scale=" << num(c.weight_scale) << "\n"
       << "nmin=" << c.n_min << "\n"
       << "nmax=" << c.n_max << "\n"
       << "nu=" << c.nu << "\n"
       << "wlow=" << c.w_low << "\n"
       << "whigh=" << c.w_high << "\n"
       << "seed=" << c.seed << "\n"
       << "out=\"" << a.out << "\"\n"
       << "log=\"" << a.log << "\"\n";
    if (!a.init_model.empty()) os << "init-model=\"" << a.init_model << "\"\n";
    if (a.allow_sense_change) os << "allow-sense-change=true\n";
    return os.str();
}

int cmd_train(TrainArgs& a, const CLI::App*) {
    TrainConfig& cfg = a.cfg;
    cfg.problem = problem_from_string(a.problem);
    cfg.sense = sense_from_string(a.sense);
    if (cfg.problem == Problem::mcp) {  // weighted-instance defaults
        if (!a.rho_set) cfg.rho = 0.01;
        if (!a.scale_set) cfg.weight_scale = 0.01;
        if (!a.wlow_set) cfg.w_low = 1;
        if (!a.whigh_set) cfg.w_high = 10;
    }
    if (a.log.empty()) a.log = a.out + ".log";

    LoadedModel init;
    const bool has_init = !a.init_model.empty();
    if (has_init) init = checkpoint_load(a.init_model);

    auto result = train(cfg, nullptr, has_init ? &init : nullptr, a.allow_sense_change);

    checkpoint_save(a.out, result.params, cfg);
    std::ofstream lf(a.log, std::ios::binary);
    if (!lf) throw IoError("cannot write " + a.log);
    write_log(lf, result.log);
    write_text(a.out + ".config", train_resolved_config(cfg, a));

    std::cout << "model: " << a.out << "\nlog: " << a.log
              << "\nbest validation score: " << format_bound(result.best_val_score) << "\n";
    return 0;
}

// ---------------------------------------------------------------
// bound
// ---------------------------------------------------------------

struct BoundArgs {
    std::string instance;
    std::string problem = "misp";
    std::string method = "mpd";
    std::string sense = "ub";
    int width = 10;
    std::string model;
    std::string dot;
    std::uint64_t seed = 0;
};

template <DpModel Model>
int bound_impl(const BoundArgs& a, const Graph& g, const EvalOptions& opt, OrderingKind kind,
               const CLI::App* sub) {
    const DdMode mode = opt.sense == Sense::ub ? DdMode::relaxed : DdMode::restricted;
    std::vector<int> ordering;
    switch (kind) {
        case OrderingKind::rand: ordering = rand_ordering(g, a.seed); break;
        case OrderingKind::mpd: ordering = mpd_ordering(g); break;
        case OrderingKind::deg: ordering = deg_ordering(g); break;
        case OrderingKind::maxw: ordering = maxweight_ordering(g); break;
        default: break;
    }

    DecisionDiagram<Model> dd = [&]() {
        if (!ordering.empty()) return compile(Model(g), g, ordering, mode, a.width);
        if (kind == OrderingKind::learned)
            return compile_with_policy(
                Model(g), g,
                [&](const DecisionDiagram<Model>& d, const std::vector<int>&) {
                    return greedy_action(*opt.model, g, d.inserted_mask(), opt.weight_scale);
                },
                mode, a.width);
        if constexpr (std::is_same_v<Model, MispModel>) {
            return compile_with_policy(
                Model(g), g,
                [](const DecisionDiagram<MispModel>& d, const std::vector<int>& rem) {
                    return min_states_next(d, rem);
                },
                mode, a.width);
        } else {
            throw ConfigError("the min heuristic is defined for misp only");
        }
    }();

    std::cout << format_bound(dd.bound()) << "\n";
    if (!a.dot.empty()) {
        std::ofstream f(a.dot, std::ios::binary);
        if (!f) throw IoError("cannot write " + a.dot);
        to_dot(dd, f);
        write_config(a.dot, sub);
    }
    return 0;
}

int cmd_bound(const BoundArgs& a, const CLI::App* sub) {
    const OrderingKind kind = ordering_from_string(a.method);
    Problem problem = problem_from_string(a.problem);

    EvalOptions opt;
    opt.sense = sense_from_string(a.sense);
    opt.width = a.width;

    LoadedModel loaded;
    if (kind == OrderingKind::learned) {
        if (a.model.empty()) throw ConfigError("--method learned requires --model");
        loaded = checkpoint_load(a.model);
        if (loaded.meta.problem != problem)
            throw ConfigError("model was trained for " +
                              std::string(to_string(loaded.meta.problem)) +
                              ", refusing to evaluate it on " + a.problem);
        opt.model = &loaded.params;
        opt.weight_scale = loaded.meta.weight_scale;
    }

    Graph g = load_instance(a.instance);
    if (problem == Problem::misp) return bound_impl<MispModel>(a, g, opt, kind, sub);
    return bound_impl<McpModel>(a, g, opt, kind, sub);
}

// ---------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------

struct EvaluateArgs {
    std::vector<std::string> instances;
    std::string dir;
    std::string problem = "misp";
    std::string methods = "rand,mpd,deg";
    std::string sense = "ub";
    int width = 10;
    std::string model;
    int trials = 100;
    int jobs = 1;
    std::uint64_t seed = 0;
    std::string out;
    bool no_optimum = false;
};

int cmd_evaluate(const EvaluateArgs& a, const CLI::App* sub) {
    std::vector<std::string> paths = a.instances;
    if (!a.dir.empty()) {
        if (!fs::is_directory(a.dir)) throw ConfigError(a.dir + " is not a directory");
        for (const auto& e : fs::directory_iterator(a.dir))
            if (e.path().extension() == ".gr") paths.push_back(e.path().string());
        std::sort(paths.begin(), paths.end());
    }
    if (paths.empty()) throw ConfigError("no instances given");

    EvalOptions opt;
    opt.problem = problem_from_string(a.problem);
    opt.sense = sense_from_string(a.sense);
    opt.width = a.width;
    opt.rand_trials = a.trials;
    opt.seed = a.seed;
    opt.jobs = a.jobs;
    opt.with_optimum = !a.no_optimum;

    LoadedModel loaded;
    auto methods = parse_methods(a.methods);
    const bool needs_model =
        std::find(methods.begin(), methods.end(), OrderingKind::learned) != methods.end();
    if (needs_model) {
        if (a.model.empty()) throw ConfigError("--methods learned requires --model");
        loaded = checkpoint_load(a.model);
        if (loaded.meta.problem != opt.problem)
            throw ConfigError("model was trained for " +
                              std::string(to_string(loaded.meta.problem)) +
                              ", refusing to evaluate it on " + a.problem);
        opt.model = &loaded.params;
        opt.weight_scale = loaded.meta.weight_scale;
    }

    std::vector<EvalInstance> instances;
    for (const auto& p : paths) instances.push_back({fs::path(p).stem().string(), load_instance(p)});

    auto rows = evaluate_methods(instances, methods, opt);
    if (a.out.empty()) {
        write_eval_csv(std::cout, rows);
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw IoError("cannot write " + a.out);
        write_eval_csv(f, rows);
        write_config(a.out, sub);
        std::cout << "wrote " << rows.size() << " rows to " << a.out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------
// profile
// ---------------------------------------------------------------

struct ProfileArgs {
    std::string in;
    std::string out;
    std::string methods;  // optional filter, comma separated
};

int cmd_profile(const ProfileArgs& a, const CLI::App* sub) {
    std::ifstream f(a.in, std::ios::binary);
    if (!f) throw IoError("cannot read " + a.in);
    std::string line;
    if (!std::getline(f, line) || line.rfind("instance,method,", 0) != 0)
        throw ddopt::ParseError("not an evaluation csv (missing header)", 1);

    std::vector<std::string> filter;
    if (!a.methods.empty()) {
        std::stringstream ss(a.methods);
        std::string m;
        while (std::getline(ss, m, ',')) filter.push_back(m);
    }

    std::map<std::string, std::map<std::string, double>> by_instance;  // instance -> method -> gap
    std::vector<std::string> instance_order, method_order;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string inst, method, rest;
        if (!std::getline(ss, inst, ',') || !std::getline(ss, method, ','))
            throw ddopt::ParseError("bad csv row", lineno);
        std::vector<std::string> cols;
        while (std::getline(ss, rest, ',')) cols.push_back(rest);
        if (cols.size() < 5) throw ddopt::ParseError("bad csv row", lineno);
        const double gap = std::strtod(cols[4].c_str(), nullptr);
        if (!filter.empty() &&
            std::find(filter.begin(), filter.end(), method) == filter.end())
            continue;
        if (std::isnan(gap))
            throw ConfigError("row " + std::to_string(lineno) +
                              " has no gap (was the oracle skipped?)");
        if (!by_instance.count(inst)) instance_order.push_back(inst);
        if (std::find(method_order.begin(), method_order.end(), method) == method_order.end())
            method_order.push_back(method);
        by_instance[inst][method] = gap;
    }
    if (instance_order.empty()) throw ConfigError("no data rows in " + a.in);

    std::vector<std::vector<double>> matrix;
    for (const auto& inst : instance_order) {
        std::vector<double> row;
        for (const auto& m : method_order) {
            auto it = by_instance[inst].find(m);
            if (it == by_instance[inst].end())
                throw ConfigError("instance " + inst + " is missing method " + m);
            row.push_back(it->second);
        }
        matrix.push_back(std::move(row));
    }

    auto points = performance_profile(matrix, method_order);
    if (a.out.empty()) {
        write_profile_csv(std::cout, points);
    } else {
        std::ofstream of(a.out, std::ios::binary);
        if (!of) throw IoError("cannot write " + a.out);
        write_profile_csv(of, points);
        write_config(a.out, sub);
        std::cout << "wrote " << points.size() << " points to " << a.out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decision-diagram bounding with learned variable orderings"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value config file with a [subcommand] section; flags override");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "generate random instances");
    gen->add_option("--problem", ga.problem, "misp or mcp")->capture_default_str();
    gen->add_option("--n", ga.n, "vertex count")->capture_default_str();
    gen->add_option("--nu", ga.nu, "attachment parameter")->capture_default_str();
    gen->add_option("--count", ga.count, "number of instances")->capture_default_str();
    gen->add_option("--seed", ga.seed, "rng seed")->capture_default_str();
    gen->add_option("--wlow", ga.wlow, "minimum edge weight (default by problem)");
    gen->add_option("--whigh", ga.whigh, "maximum edge weight (default by problem)");
    gen->add_option("--out", ga.out_dir, "output directory")->capture_default_str();

    TrainArgs ta;
    auto* tr = app.add_subcommand("train", "train an ordering policy");
    tr->add_option("--problem", ta.problem, "misp or mcp")->capture_default_str();
    tr->add_option("--sense", ta.sense, "ub (relaxed) or lb (restricted)")->capture_default_str();
    tr->add_option("--episodes", ta.cfg.episodes)->capture_default_str();
    tr->add_option("--batch", ta.cfg.batch_size)->capture_default_str();
    tr->add_option("--eps-start", ta.cfg.eps.start)->capture_default_str();
    tr->add_option("--eps-end", ta.cfg.eps.end)->capture_default_str();
    tr->add_option("--eps-fraction", ta.cfg.eps.fraction)->capture_default_str();
    auto* rho_opt = tr->add_option("--rho", ta.cfg.rho, "reward scale");
    tr->add_option("--alpha", ta.cfg.alpha, "learning rate")->capture_default_str();
    tr->add_option("--gamma", ta.cfg.gamma, "discount")->capture_default_str();
    tr->add_option("--capacity", ta.cfg.capacity, "replay capacity")->capture_default_str();
    tr->add_option("--width", ta.cfg.width, "training diagram width")->capture_default_str();
    tr->add_option("--train-size", ta.cfg.train_size)->capture_default_str();
    tr->add_option("--refresh-every", ta.cfg.refresh_every)->capture_default_str();
    tr->add_option("--val-size", ta.cfg.val_size)->capture_default_str();
    tr->add_option("--val-every", ta.cfg.val_every)->capture_default_str();
    tr->add_option("--embed-dim", ta.cfg.embed_dim)->capture_default_str();
    tr->add_option("--depth", ta.cfg.depth, "embedding recursion depth")->capture_default_str();
    auto* scale_opt = tr->add_option("--weight-scale", ta.cfg.weight_scale, "edge weight input scale");
    tr->add_option("--nmin", ta.cfg.n_min)->capture_default_str();
    tr->add_option("--nmax", ta.cfg.n_max)->capture_default_str();
    tr->add_option("--nu", ta.cfg.nu)->capture_default_str();
    auto* wlow_opt = tr->add_option("--wlow", ta.cfg.w_low, "minimum edge weight");
    auto* whigh_opt = tr->add_option("--whigh", ta.cfg.w_high, "maximum edge weight");
    tr->add_option("--seed", ta.cfg.seed)->capture_default_str();
    tr->add_option("--out", ta.out, "model output path")->capture_default_str();
    tr->add_option("--log", ta.log, "training log path (default <out>.log)");
    tr->add_option("--init-model", ta.init_model, "warm-start from a checkpoint");
    tr->add_flag("--allow-sense-change", ta.allow_sense_change,
                 "permit fine-tuning a model across bound senses");

    BoundArgs ba;
    auto* bo = app.add_subcommand("bound", "compile one diagram and print its bound");
    bo->add_option("--instance", ba.instance, "instance file")->required();
    bo->add_option("--problem", ba.problem, "misp or mcp")->capture_default_str();
    bo->add_option("--method", ba.method, "rand|mpd|deg|maxw|min|learned")->capture_default_str();
    bo->add_option("--sense", ba.sense)->capture_default_str();
    bo->add_option("--width", ba.width)->capture_default_str();
    bo->add_option("--model", ba.model, "model file for --method learned");
    bo->add_option("--dot", ba.dot, "write the diagram in DOT format");
    bo->add_option("--seed", ba.seed, "seed for --method rand")->capture_default_str();

    EvaluateArgs ea;
    auto* ev = app.add_subcommand("evaluate", "compare ordering methods over instances");
    ev->add_option("instances", ea.instances, "instance files");
    ev->add_option("--dir", ea.dir, "directory of .gr instances");
    ev->add_option("--problem", ea.problem)->capture_default_str();
    ev->add_option("--methods", ea.methods, "comma-separated method list")->capture_default_str();
    ev->add_option("--sense", ea.sense)->capture_default_str();
    ev->add_option("--width", ea.width)->capture_default_str();
    ev->add_option("--model", ea.model, "model file for learned");
    ev->add_option("--trials", ea.trials, "rand trials")->capture_default_str();
    ev->add_option("--jobs", ea.jobs, "parallel workers")->capture_default_str();
    ev->add_option("--seed", ea.seed)->capture_default_str();
    ev->add_option("--out", ea.out, "csv output path (default stdout)");
    ev->add_flag("--no-optimum", ea.no_optimum, "skip the brute-force oracle");

    ProfileArgs pa;
    auto* pr = app.add_subcommand("profile", "performance profile from an evaluation csv");
    pr->add_option("--in", pa.in, "evaluation csv")->required();
    pr->add_option("--out", pa.out, "profile csv output path (default stdout)");
    pr->add_option("--methods", pa.methods, "optional comma-separated method filter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    ta.rho_set = rho_opt->count() > 0;
    ta.scale_set = scale_opt->count() > 0;
    ta.wlow_set = wlow_opt->count() > 0;
    ta.whigh_set = whigh_opt->count() > 0;

    try {
        if (gen->parsed()) return cmd_generate(ga);
        if (tr->parsed()) return cmd_train(ta, tr);
        if (bo->parsed()) return cmd_bound(ba, bo);
        if (ev->parsed()) return cmd_evaluate(ea, ev);
        if (pr->parsed()) return cmd_profile(pa, pr);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
