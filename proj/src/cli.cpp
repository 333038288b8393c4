#include "dcrp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include <boost/version.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include "dcrp/continuous.hpp"
#include "dcrp/discrete.hpp"
#include "dcrp/error.hpp"
#include "dcrp/experiments.hpp"
#include "dcrp/parallel.hpp"
#include "dcrp/pointprocess.hpp"
#include "dcrp/scaling.hpp"
#include "dcrp/table.hpp"
#include "dcrp/yule.hpp"

namespace dcrp {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitUsage = 1;
constexpr int kExitStatistical = 2;
constexpr int kExitInfeasible = 3;
constexpr double kBudget = 1e10;

constexpr std::uint64_t kStreamDiscrete = 0x5d00;
constexpr std::uint64_t kStreamContinuous = 0x5c00;
constexpr std::uint64_t kStreamBoxes = 0x5b00;

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::ScheduleInfeasible:
    case ErrorKind::BudgetExceeded:
    case ErrorKind::TooFewTables: return kExitInfeasible;
    default: return kExitUsage;
    }
}

struct Globals {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    std::string format = "csv";
    unsigned threads = 1;
    bool threads_given = false;
    bool force = false;
};

std::vector<std::string> strip_out_dir(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out-dir") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out-dir=", 0) == 0) continue;
        out.push_back(args[i]);
    }
    return out;
}

json options_json(const CLI::App* sub) {
    json j = json::object();
    for (const CLI::Option* o : sub->get_options()) {
        const auto& names = o->get_lnames();
        if (names.empty() || names.front() == "help") continue;
        const auto res = o->count() ? o->results() : std::vector<std::string>{};
        if (!res.empty()) j[names.front()] = res.size() == 1 ? json(res.front()) : json(res);
        else if (!o->get_default_str().empty()) j[names.front()] = o->get_default_str();
    }
    return j;
}

json config_json(const ExperimentConfig& c) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["experiment"] = to_string(c.kind);
    j["dist"] = c.spec.key();
    j["theta"] = c.theta;
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    j["replicas"] = c.replicas;
    j["t_grid"] = c.t_grid;
    j["t_max"] = c.t_max;
    j["n_grid"] = c.n_grid;
    j["schedule"] = {{"eta", opt(c.eta)}, {"kappa", opt(c.kappa)}, {"phi", opt(c.phi)}, {"rho", opt(c.rho)}};
    j["outside_theorem"] = c.outside_theorem;
    j["include_root_table"] = c.include_root_table ? json(*c.include_root_table) : json(nullptr);
    j["window"] = c.window;
    j["dip_window"] = c.dip_window;
    j["min_change_n"] = c.min_change_n;
    j["checks"] = {{"median_share", c.median_share},       {"path_fraction", c.path_fraction},
                   {"separation_fraction", c.separation_fraction}, {"kn_low", c.kn_low},
                   {"kn_high", c.kn_high},                 {"dip_level", c.dip_level}};
    return j;
}

class Session {
public:
    Session(const Globals& g, std::vector<std::string> args, std::string command)
        : g_(g), args_(std::move(args)), command_(std::move(command)), format_(parse_format(g.format)) {}

    std::uint64_t seed() const {
        if (!g_.seed_given) throw Error(ErrorKind::Parse, command_ + " needs --seed");
        return g_.seed;
    }
    unsigned threads() const { return resolve_threads(g_.threads); }
    bool force() const { return g_.force; }
    const Globals& globals() const { return g_; }

    /// --out wins, then --out-dir/<name>.<ext>, then stdout.
    void emit(const std::string& name, const DataTable& t, const std::string& out_file = {}) {
        if (!out_file.empty()) {
            write_file(out_file, t);
        } else if (!g_.out_dir.empty()) {
            fs::create_directories(g_.out_dir);
            write_file((fs::path(g_.out_dir) / (name + "." + extension(format_))).string(), t);
        } else {
            write_table(std::cout, t, format_);
        }
    }

    void set_config(json j) { config_ = std::move(j); }

    void finish(int code) {
        if (g_.out_dir.empty()) return;
        json m;
        m["tool"] = "dcrp";
        m["version"] = kVersion;
        m["command"] = command_;
        m["args"] = strip_out_dir(args_);
        m["seed"] = g_.seed_given ? json(g_.seed) : json(nullptr);
        m["format"] = g_.format;
        m["config"] = config_;
        m["outputs"] = outputs_;
        m["exit_code"] = code;
        m["versions"] = {{"dcrp", kVersion},
                         {"compiler", __VERSION__},
                         {"boost", BOOST_LIB_VERSION},
                         {"cli11", CLI11_VERSION},
                         {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                               std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                               std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                         {"config_reader", config_library_version()}};
        fs::create_directories(g_.out_dir);
        std::ofstream os(fs::path(g_.out_dir) / "manifest.json");
        os << m.dump(2) << '\n';
    }

private:
    void write_file(const std::string& path, const DataTable& t) {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error(ErrorKind::Parse, "cannot write '" + path + "'");
        write_table(os, t, format_);
        outputs_.push_back(fs::path(path).filename().string());
    }

    Globals g_;
    std::vector<std::string> args_;
    std::string command_;
    Format format_;
    json config_ = json::object();
    std::vector<std::string> outputs_;
};

void budget(const Session& s, double ops) {
    if (ops > kBudget && !s.force())
        throw Error(ErrorKind::BudgetExceeded,
                    "about " + format_double(ops) + " steps requested (limit 1e10); pass --force to run anyway");
}

std::vector<double> t_values(double t, const std::vector<double>& grid) {
    if (!grid.empty()) return grid;
    if (t > 0.0) return {t};
    throw Error(ErrorKind::Parse, "give --t or --t-grid");
}

// ---- subcommands -----------------------------------------------------------------------------

struct DiscreteOpts {
    double theta = 1.0;
    std::string dist;
    std::uint64_t n_max = 0;
    std::vector<std::uint64_t> checkpoints;
    std::uint64_t replicas = 1;
    std::string out;
};

int cmd_simulate_discrete(Session& s, const DiscreteOpts& o) {
    const auto spec = FitnessSpec::parse(o.dist);
    auto cps = o.checkpoints.empty() ? std::vector<std::uint64_t>{o.n_max} : o.checkpoints;
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    budget(s, static_cast<double>(o.replicas) * static_cast<double>(o.n_max));
    const DiscreteConfig cfg{o.theta, spec, o.n_max, cps};
    const auto seed = s.seed();
    const auto paths = map_replicas(o.replicas, s.threads(), [&](std::uint64_t i) {
        auto rng = make_rng(seed, kStreamDiscrete, i);
        return run_discrete(cfg, rng);
    });
    DataTable t({"replica", "n", "K_n", "s1", "s2", "s3", "share1", "share12", "leader_birth", "leader_weight"});
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (const auto& r : paths[i])
            t.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(r.n), static_cast<std::int64_t>(r.tables),
                   static_cast<std::int64_t>(r.top_sizes[0]), static_cast<std::int64_t>(r.top_sizes[1]),
                   static_cast<std::int64_t>(r.top_sizes[2]), r.share1, r.share12,
                   static_cast<std::int64_t>(r.leader_birth), r.leader_weight});
    s.emit("simulate-discrete", t, o.out);
    return 0;
}

struct ContinuousOpts {
    std::string mode = "snapshot";
    double t = 0.0;
    std::vector<double> t_grid;
    double theta = 1.0;
    std::string dist;
    std::uint64_t replicas = 1;
    bool root = false;
    bool no_root = false;
    std::string out;
};

int cmd_simulate_continuous(Session& s, const ContinuousOpts& o) {
    const auto spec = FitnessSpec::parse(o.dist);
    auto ts = t_values(o.t, o.t_grid);
    const bool evolve = o.mode == "evolve";
    if (evolve) std::sort(ts.begin(), ts.end());
    bool root = evolve;
    if (o.root) root = true;
    if (o.no_root) root = false;
    double ops = 0.0;
    for (double t : ts) ops += 1.0 + o.theta * t;
    budget(s, static_cast<double>(o.replicas) * ops);
    std::vector<ScalingTriple> triples;
    for (double t : ts) triples.push_back(solve_scaling(spec, t));
    const auto seed = s.seed();
    const auto dumps = map_replicas(o.replicas, s.threads(), [&](std::uint64_t i) {
        std::vector<PointMeasure> out;
        if (evolve) {
            auto rng = make_rng(seed, kStreamContinuous, i);
            auto r = snapshot(o.theta, spec, ts[0], rng, {.include_root_table = root, .sample_sizes = true});
            for (std::size_t g = 0; g < ts.size(); ++g) {
                if (g > 0) r.evolve(ts[g], rng);
                out.push_back(gamma_measure(r, triples[g]));
            }
        } else {
            for (std::size_t g = 0; g < ts.size(); ++g) {
                auto rng = make_rng(seed, kStreamContinuous + 1 + g, i);
                const auto r = snapshot(o.theta, spec, ts[g], rng, {.include_root_table = root, .sample_sizes = true});
                out.push_back(gamma_measure(r, triples[g]));
            }
        }
        return out;
    });
    DataTable t({"replica", "t", "n", "tau", "W", "s", "y", "z"});
    for (std::size_t i = 0; i < dumps.size(); ++i)
        for (std::size_t g = 0; g < ts.size(); ++g)
            for (const auto& p : dumps[i][g])
                t.add({static_cast<std::int64_t>(i), ts[g], static_cast<std::int64_t>(p.index + 1), p.tau, p.weight,
                       p.s, p.y, p.z});
    s.emit("simulate-continuous", t, o.out);
    return 0;
}

struct ScalingOpts {
    std::string dist;
    double t = 0.0;
    std::vector<double> t_grid;
    std::string out;
};

int cmd_verify_scaling(Session& s, const ScalingOpts& o) {
    const auto spec = FitnessSpec::parse(o.dist);
    DataTable t({"t", "u_t", "v_t", "w_t", "residual"});
    for (double tt : t_values(o.t, o.t_grid)) {
        const auto tr = solve_scaling(spec, tt);
        t.add({tt, tr.u, tr.v, tr.w, scaling_residual(spec, tr)});
    }
    s.emit("verify-scaling", t, o.out);
    return 0;
}

struct AssumptionOpts {
    std::string dist;
    double t = 0.0;
    std::optional<double> c1, c2;
    std::vector<double> grid;
    int points = 41;
    std::string out;
};

int cmd_check_assumptions(Session& s, const AssumptionOpts& o) {
    const auto spec = FitnessSpec::parse(o.dist);
    if (!(o.t > 1.0)) throw Error(ErrorKind::Parse, "check-assumptions needs --t > 1");
    const auto defaults = default_assumption_g_constants(spec);
    const double c1 = o.c1.value_or(defaults.c1);
    const double c2 = o.c2.value_or(defaults.c2);
    auto grid = o.grid;
    if (grid.empty()) {
        const auto tr = solve_scaling(spec, o.t);
        const double lt = std::log(o.t);
        const double lo = -c2 * lt;
        const double hi = std::min(c2 * lt, tr.v_gap / tr.w);
        for (int i = 0; i < o.points; ++i) grid.push_back(lo + (hi - lo) * (i + 0.5) / o.points);
    }
    const auto rep = check_assumption_g(spec, o.t, c1, c2, grid);
    DataTable t({"x", "phi_t", "lower", "upper", "pass"});
    for (const auto& r : rep.rows) t.add({r.x, r.phi_t, r.lower, r.upper, r.pass});
    s.emit("check-assumptions", t, o.out);
    return 0;
}

struct PppOpts {
    std::string dist;
    double theta = 1.0;
    double t = 0.0;
    std::vector<std::string> boxes{"0.5:1"};
    std::uint64_t replicas = 1000;
    std::vector<double> void_x;
    std::vector<double> gap_lambdas;
    std::string out;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        const std::string piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, "bad " + what + " '" + text + "'");
        }
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    return parts;
}

BoxSpec parse_box(const std::string& text) {
    const auto parts = parse_numbers(text, "box");
    if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorKind::Parse, "bad box '" + text + "' (expected a:b or a:b:c)");
    BoxSpec b{parts[0], parts[1], std::nullopt};
    if (parts.size() == 3) b.c = parts[2];
    return b;
}

int cmd_ppp_compare(Session& s, const PppOpts& o) {
    const auto spec = FitnessSpec::parse(o.dist);
    if (!(o.t > 0.0)) throw Error(ErrorKind::Parse, "ppp-compare needs --t");
    budget(s, static_cast<double>(o.replicas) * (1.0 + o.theta * o.t));
    const auto seed = s.seed();
    const auto tr = solve_scaling(spec, o.t);
    int code = 0;
    if (!o.void_x.empty()) {
        const auto rows = void_identity_compare(o.theta, spec, o.t, o.void_x, o.replicas, seed, s.threads());
        DataTable t({"x", "t", "replicas", "predicted", "empirical", "se", "z"});
        for (const auto& r : rows) {
            t.add({r.x, o.t, static_cast<std::int64_t>(o.replicas), r.predicted, r.empirical, r.se, r.z});
            if (std::abs(r.z) > 3.0) code = kExitStatistical;
        }
        s.emit("ppp-compare", t, o.out);
        return code;
    }
    if (!o.gap_lambdas.empty()) {
        const auto rep = gap_probabilities(o.theta, spec, o.t, o.gap_lambdas, o.replicas, seed, s.threads());
        DataTable t({"lambda", "t", "replicas", "used", "frequency", "wilson_lo", "wilson_hi", "ratio"});
        for (const auto& r : rep.rows)
            t.add({r.lambda, o.t, static_cast<std::int64_t>(o.replicas), static_cast<std::int64_t>(r.used),
                   r.frequency, r.wilson.lo, r.wilson.hi, r.ratio});
        s.emit("ppp-compare", t, o.out);
        return 0;
    }
    std::vector<BoxSpec> boxes;
    for (const auto& b : o.boxes) boxes.push_back(parse_box(b));
    const bool need_sizes = std::any_of(boxes.begin(), boxes.end(), [](const BoxSpec& b) { return b.c.has_value(); });
    const auto counts = map_replicas(o.replicas, s.threads(), [&](std::uint64_t i) {
        auto rng = make_rng(seed, kStreamBoxes, i);
        const auto r = snapshot(o.theta, spec, o.t, rng, {.include_root_table = false, .sample_sizes = need_sizes});
        const auto pm = gamma_measure(r, tr);
        std::vector<std::uint64_t> c;
        for (const auto& b : boxes) c.push_back(count_in_box(pm, b));
        return c;
    });
    DataTable t({"a", "b", "c", "t", "replicas", "predicted_mean", "predicted_mean_finite", "empirical_mean", "se", "z",
                 "z_finite", "predicted_void", "predicted_void_finite", "empirical_void", "z_void",
                 "z_void_finite"});
    for (std::size_t k = 0; k < boxes.size(); ++k) {
        std::vector<std::uint64_t> col;
        for (const auto& c : counts) col.push_back(c[k]);
        const auto pred = box_prediction(o.theta, spec, tr, boxes[k]);
        const auto cmp = empirical_compare(col, pred);
        t.add({boxes[k].a, boxes[k].b, boxes[k].c.value_or(std::numeric_limits<double>::quiet_NaN()), o.t,
               static_cast<std::int64_t>(o.replicas), pred.mean_limit, pred.mean_finite, cmp.empirical_mean, cmp.se,
               cmp.z, cmp.z_finite, pred.void_limit, pred.void_finite, cmp.empirical_void, cmp.z_void,
               cmp.z_void_finite});
        if (!boxes[k].c && (std::abs(cmp.z_finite) > 3.0 || std::abs(cmp.z_void_finite) > 3.0)) code = kExitStatistical;
    }
    s.emit("ppp-compare", t, o.out);
    return code;
}

struct YuleOpts {
    std::vector<std::string> grid{"1:1:2:2", "1:1:1.5:2", "2:1:2:2.5", "0.5:2:4:1", "1:5:6:1.2", "3:1:1.5:3.5"};
    std::uint64_t replicas = 10000;
    int steps = 1000;
    std::string out;
};

int cmd_yule_tail(Session& s, const YuleOpts& o) {
    const auto seed = s.seed();
    budget(s, static_cast<double>(o.replicas) * o.steps * static_cast<double>(o.grid.size()));
    DataTable t({"lambda", "a", "b", "y", "empirical", "bound", "replicas"});
    int code = 0;
    for (std::size_t k = 0; k < o.grid.size(); ++k) {
        const auto v = parse_numbers(o.grid[k], "grid point");
        if (v.size() != 4) throw Error(ErrorKind::Parse, "grid points are lambda:a:b:y");
        const double bound = yule_tail_bound(v[0], v[1], v[2], v[3]);
        const double freq =
            yule_sup_deviation_frequency(v[0], v[1], v[2], v[3], o.replicas, o.steps, splitmix64(seed + k));
        t.add({v[0], v[1], v[2], v[3], freq, bound, static_cast<std::int64_t>(o.replicas)});
        const double se = std::sqrt(bound * (1.0 - bound) / static_cast<double>(o.replicas));
        if (freq > bound + 3.0 * se) code = kExitStatistical;
    }
    s.emit("yule-tail", t, o.out);
    return code;
}

struct ExperimentOpts {
    ExperimentKind kind;
    std::string config;
    std::string dist;
    std::optional<double> theta;
    std::optional<std::uint64_t> replicas;
    std::vector<double> t_grid;
    std::optional<double> t_max;
    std::vector<std::uint64_t> n_grid;
    std::optional<double> eta, kappa, phi, rho;
    bool outside_theorem = false;
    std::optional<std::size_t> window;
    std::string out;
};

int cmd_experiment(Session& s, const ExperimentOpts& o) {
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_experiment_config(o.config);
    if (cfg.kind_declared && cfg.kind != o.kind)
        throw Error(ErrorKind::Parse, std::string("config describes a ") + to_string(cfg.kind) + " experiment");
    cfg.kind = o.kind;
    if (!o.dist.empty()) cfg.spec = FitnessSpec::parse(o.dist);
    if (o.theta) cfg.theta = *o.theta;
    if (o.replicas) cfg.replicas = *o.replicas;
    if (!o.t_grid.empty()) cfg.t_grid = o.t_grid;
    if (o.t_max) cfg.t_max = *o.t_max;
    if (!o.n_grid.empty()) cfg.n_grid = o.n_grid;
    if (o.eta) cfg.eta = o.eta;
    if (o.kappa) cfg.kappa = o.kappa;
    if (o.phi) cfg.phi = o.phi;
    if (o.rho) cfg.rho = o.rho;
    if (o.outside_theorem) cfg.outside_theorem = true;
    if (o.window) cfg.window = *o.window;
    if (s.globals().seed_given) cfg.seed = s.globals().seed;
    if (!cfg.seed) throw Error(ErrorKind::Parse, "experiments need --seed (or seed in the config)");
    if (s.globals().threads_given) cfg.threads = s.globals().threads;
    cfg.force = cfg.force || s.force();
    s.set_config(config_json(cfg));

    const auto res = run_experiment(cfg);
    const std::string name = std::string("exp-") + to_string(cfg.kind);
    s.emit(name, res.table, o.out);
    if (!s.globals().out_dir.empty()) {
        s.emit("checks", checks_table(res.checks));
    } else {
        for (const auto& c : res.checks)
            std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value)
                      << " threshold=" << format_double(c.threshold) << "  " << c.detail << '\n';
    }
    return res.passed() ? 0 : kExitStatistical;
}

template <class T>
CLI::Option* add_optional(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& desc) {
    return app->add_option_function<T>(name, [&target](const T& v) { target = v; }, desc);
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Disordered Chinese restaurant process simulator", "dcrp"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Master seed; required by stochastic commands");
    app.add_option("--out-dir", g.out_dir, "Write outputs and manifest.json under this directory");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
    auto* threads_opt = app.add_option("--threads", g.threads, "Worker threads (0: all cores; CRP_THREADS overrides)");
    app.add_flag("--force", g.force, "Run configurations above the 1e10-step budget");

    std::function<int(Session&)> handler;
    std::string command;
    auto sub = [&](const std::string& name, const std::string& desc, std::function<int(Session&)> fn) {
        auto* c = app.add_subcommand(name, desc);
        c->callback([&command, &handler, name, fn] {
            command = name;
            handler = fn;
        });
        return c;
    };

    DiscreteOpts dopt;
    {
        auto* c = sub("simulate-discrete", "Discrete-time restaurant trajectories", [&](Session& s) {
            return cmd_simulate_discrete(s, dopt);
        });
        c->add_option("--theta", dopt.theta, "New-table rate")->capture_default_str();
        c->add_option("--dist", dopt.dist, "Weight distribution key, e.g. weibull:alpha=2")->required();
        c->add_option("--n-max", dopt.n_max, "Customers per trajectory")->required()->check(CLI::PositiveNumber);
        c->add_option("--checkpoints", dopt.checkpoints, "Customer counts to record")->delimiter(',');
        c->add_option("--replicas", dopt.replicas, "Independent trajectories")->capture_default_str();
        c->add_option("--out", dopt.out, "Output file");
    }
    ContinuousOpts copt;
    {
        auto* c = sub("simulate-continuous", "Continuous-time embedding and point-measure dumps", [&](Session& s) {
            return cmd_simulate_continuous(s, copt);
        });
        c->add_option("--mode", copt.mode, "snapshot or evolve")->check(CLI::IsMember({"snapshot", "evolve"}))
            ->capture_default_str();
        c->add_option("--t", copt.t, "Horizon");
        c->add_option("--t-grid", copt.t_grid, "Horizons")->delimiter(',');
        c->add_option("--theta", copt.theta, "New-table rate")->capture_default_str();
        c->add_option("--dist", copt.dist, "Weight distribution key")->required();
        c->add_option("--replicas", copt.replicas, "Independent restaurants")->capture_default_str();
        c->add_flag("--include-root-table", copt.root, "Start with one customer at time 0 (default in evolve mode)");
        c->add_flag("--no-root-table", copt.no_root, "Start empty (default in snapshot mode)");
        c->add_option("--out", copt.out, "Output file");
    }
    ScalingOpts sopt;
    {
        auto* c = sub("verify-scaling", "Scaling triple (u_t, v_t, w_t) on a horizon grid", [&](Session& s) {
            return cmd_verify_scaling(s, sopt);
        });
        c->add_option("--dist", sopt.dist, "Weight distribution key")->required();
        c->add_option("--t", sopt.t, "Horizon");
        c->add_option("--t-grid", sopt.t_grid, "Horizons")->delimiter(',');
        c->add_option("--out", sopt.out, "Output file");
    }
    AssumptionOpts aopt;
    {
        auto* c = sub("check-assumptions", "Audit the quadratic envelope of Phi_t around e^-x", [&](Session& s) {
            return cmd_check_assumptions(s, aopt);
        });
        c->add_option("--dist", aopt.dist, "Gumbel-class distribution key")->required();
        c->add_option("--t", aopt.t, "Horizon")->required();
        add_optional(c, "--c1", aopt.c1, "Quadratic constant (default per entry)");
        add_optional(c, "--c2", aopt.c2, "Range constant (default per entry)");
        c->add_option("--grid", aopt.grid, "x values")->delimiter(',');
        c->add_option("--points", aopt.points, "Grid size when --grid is absent")->capture_default_str();
        c->add_option("--out", aopt.out, "Output file");
    }
    PppOpts popt;
    {
        auto* c = sub("ppp-compare", "Box counts, void identity and exponent gaps against predictions",
                      [&](Session& s) { return cmd_ppp_compare(s, popt); });
        c->add_option("--dist", popt.dist, "Weight distribution key")->required();
        c->add_option("--theta", popt.theta, "New-table rate")->capture_default_str();
        c->add_option("--t", popt.t, "Horizon")->required();
        c->add_option("--box", popt.boxes, "a:b or a:b:c (repeatable)")->capture_default_str();
        c->add_option("--replicas", popt.replicas, "Snapshots")->capture_default_str();
        c->add_option("--void-x", popt.void_x, "Compare P(xi1 <= x) with exp(-pi(A_t(x))) instead")->delimiter(',');
        c->add_option("--gap-lambdas", popt.gap_lambdas, "Report P(xi1 - xi3 <= lambda) instead")->delimiter(',');
        c->add_option("--out", popt.out, "Output file");
    }
    YuleOpts yopt;
    {
        auto* c = sub("yule-tail", "Empirical sup-deviation of Yule paths against the tail bound",
                      [&](Session& s) { return cmd_yule_tail(s, yopt); });
        c->add_option("--grid", yopt.grid, "lambda:a:b:y (repeatable)")->capture_default_str();
        c->add_option("--replicas", yopt.replicas, "Paths per grid point")->capture_default_str();
        c->add_option("--steps", yopt.steps, "Sub-intervals of [a, b]")->capture_default_str();
        c->add_option("--out", yopt.out, "Output file");
    }
    ExperimentOpts eopt{};
    auto add_experiment = [&](const std::string& name, ExperimentKind kind, const std::string& desc) {
        auto* c = sub(name, desc, [&eopt, kind](Session& s) {
            eopt.kind = kind;
            return cmd_experiment(s, eopt);
        });
        c->add_option("--config", eopt.config, "TOML experiment file");
        c->add_option("--dist", eopt.dist, "Weight distribution key");
        add_optional(c, "--theta", eopt.theta, "New-table rate");
        add_optional(c, "--replicas", eopt.replicas, "Replicas");
        c->add_option("--t-grid", eopt.t_grid, "Horizons")->delimiter(',');
        add_optional(c, "--t-max", eopt.t_max, "Last checkpoint time");
        c->add_option("--n-grid", eopt.n_grid, "Customer checkpoints")->delimiter(',');
        add_optional(c, "--eta", eopt.eta, "Checkpoints t_k = k^eta");
        add_optional(c, "--kappa", eopt.kappa, "Separation scale lambda_t = t^-kappa");
        add_optional(c, "--phi", eopt.phi, "Auxiliary exponent phi");
        add_optional(c, "--rho", eopt.rho, "Auxiliary exponent rho");
        c->add_flag("--outside-theorem", eopt.outside_theorem, "Skip schedule validation");
        add_optional(c, "--window", eopt.window, "Checkpoints compared at each end of a path");
        c->add_option("--out", eopt.out, "Output file");
    };
    add_experiment("exp-one-table", ExperimentKind::OneTable, "Leader share quantiles across snapshots");
    add_experiment("exp-two-table", ExperimentKind::TwoTable, "Single-path two-table trend along t_k = k^eta");
    add_experiment("exp-basic", ExperimentKind::Basic, "K_n / log n, first-table share and leader birth");
    add_experiment("exp-transitions", ExperimentKind::Transitions, "Leadership changes and share dips");

    std::string manifest_path;
    {
        auto* c = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
        c->add_option("--manifest", manifest_path, "manifest.json of the original run")->required();
        c->callback([&] { command = "rerun"; });
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    g.seed_given = seed_opt->count() > 0;
    g.threads_given = threads_opt->count() > 0;

    if (command == "rerun") {
        std::ifstream in(manifest_path);
        if (!in) throw Error(ErrorKind::Parse, "cannot open manifest '" + manifest_path + "'");
        const json m = json::parse(in);
        if (g.out_dir.empty()) throw Error(ErrorKind::Parse, "rerun needs --out-dir");
        auto again = m.at("args").get<std::vector<std::string>>();
        again.push_back("--out-dir");
        again.push_back(g.out_dir);
        return run(again);
    }

    Session session(g, args, command);
    std::string sub_name = command;
    for (const auto* c : app.get_subcommands())
        if (c->get_name() == sub_name) session.set_config(options_json(c));
    const int code = handler(session);
    session.finish(code);
    return code;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    try {
        return run(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

int run_cli(int argc, char** argv) { return run_cli(std::vector<std::string>(argv + 1, argv + argc)); }

} // namespace dcrp
