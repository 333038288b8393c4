#include "dcrp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <toml.hpp>

#include "dcrp/continuous.hpp"
#include "dcrp/discrete.hpp"
#include "dcrp/error.hpp"
#include "dcrp/parallel.hpp"
#include "dcrp/scaling.hpp"
#include "dcrp/stats.hpp"

namespace dcrp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBudget = 1e10;
constexpr std::uint64_t kStreamOneTable = 0x0101'0000;
constexpr std::uint64_t kStreamTwoTable = 0x0202'0000;
constexpr std::uint64_t kStreamBasic = 0x0303'0000;
constexpr std::uint64_t kStreamTransitions = 0x0404'0000;

double mid(double a, double b) { return 0.5 * (a + b); }

std::string num(double x) { return format_double(x); }

[[noreturn]] void infeasible(const std::string& what) { throw Error(ErrorKind::ScheduleInfeasible, what); }

void require_less(double a, double b, const std::string& lhs, const std::string& rhs) {
    if (!(a < b)) infeasible("needs " + lhs + " < " + rhs + " (" + num(a) + " >= " + num(b) + ")");
}

std::uint64_t require_seed(const ExperimentConfig& cfg) {
    if (!cfg.seed) throw Error(ErrorKind::Parse, "experiments need an explicit seed");
    return *cfg.seed;
}

std::vector<double> checkpoint_times(const Schedule& s, double t_max) {
    std::vector<double> ts;
    for (std::uint64_t k = 1;; ++k) {
        const double t = std::pow(static_cast<double>(k), s.eta);
        if (t > t_max) break;
        ts.push_back(t);
    }
    return ts;
}

std::optional<ScalingTriple> try_scaling(const FitnessSpec& spec, double t) {
    try {
        return solve_scaling(spec, t);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoSolution || e.kind() == ErrorKind::UnsupportedHorizon) return std::nullopt;
        throw;
    }
}

double fraction(std::uint64_t k, std::uint64_t n) {
    return n ? static_cast<double>(k) / static_cast<double>(n) : kNaN;
}

} // namespace

Schedule default_schedule(const FitnessSpec& spec) {
    Schedule s{kNaN, kNaN, kNaN, kNaN};
    const double alpha = spec.param();
    switch (spec.evt_class()) {
    case EvtClass::Weibull: {
        if (!(alpha > 1.0)) infeasible("Weibull schedules need alpha > 1");
        const double beta = 1.0 / (1.0 + alpha);
        s.kappa = mid(beta, 1.0 - beta);
        s.phi = mid(s.kappa + beta, std::min(1.0, 2 * s.kappa));
        s.eta = 1.0 / mid(s.phi, 2 * s.kappa);
        break;
    }
    case EvtClass::Gumbel:
        s.kappa = 0.5;
        s.phi = mid(s.kappa, std::min(1.0, 2 * s.kappa));
        s.eta = 1.0 / mid(s.phi, 2 * s.kappa);
        break;
    case EvtClass::Frechet:
        s.kappa = 1.0 / alpha + 0.5;
        s.eta = 1.0 / mid(s.kappa + 1.0 / alpha, 2 * s.kappa);
        s.rho = mid(std::max(0.0, 1.0 - 1.0 / s.eta), alpha / (1.0 + alpha));
        break;
    case EvtClass::None: infeasible("no schedule for a deterministic weight");
    }
    return s;
}

void validate_schedule(const FitnessSpec& spec, const Schedule& s) {
    if (!(s.eta > 0.0 && std::isfinite(s.eta))) infeasible("eta must be positive");
    if (!(s.kappa > 0.0 && std::isfinite(s.kappa))) infeasible("kappa must be positive");
    if (!(2 * s.kappa * s.eta > 1.0)) infeasible("needs 2 kappa eta > 1 (got " + num(2 * s.kappa * s.eta) + ")");
    const double alpha = spec.param();
    const double inv_eta = 1.0 / s.eta;
    switch (spec.evt_class()) {
    case EvtClass::Weibull: {
        if (!(alpha > 1.0)) infeasible("Weibull schedules need alpha > 1");
        const double beta = 1.0 / (1.0 + alpha);
        if (!std::isfinite(s.phi)) infeasible("Weibull schedules need phi");
        require_less(2 * beta, s.kappa + beta, "2/(1+alpha)", "kappa + 1/(1+alpha)");
        require_less(s.kappa + beta, 1.0, "kappa + 1/(1+alpha)", "1");
        require_less(s.kappa + beta, s.phi, "kappa + 1/(1+alpha)", "phi");
        require_less(s.phi, std::min(1.0, 2 * s.kappa), "phi", "min(1, 2 kappa)");
        require_less(s.phi, inv_eta, "phi", "1/eta");
        require_less(inv_eta, 2 * s.kappa, "1/eta", "2 kappa");
        break;
    }
    case EvtClass::Gumbel:
        if (!std::isfinite(s.phi)) infeasible("Gumbel schedules need phi");
        require_less(s.kappa, 1.0, "kappa", "1");
        require_less(s.kappa, s.phi, "kappa", "phi");
        require_less(s.phi, 1.0, "phi", "1");
        require_less(s.phi, inv_eta, "phi", "1/eta");
        require_less(inv_eta, 2 * s.kappa, "1/eta", "2 kappa");
        break;
    case EvtClass::Frechet:
        require_less(1.0 / alpha, s.kappa, "1/alpha", "kappa");
        require_less(s.kappa, (1.0 + alpha) / alpha, "kappa", "(1+alpha)/alpha");
        require_less(s.kappa + 1.0 / alpha, inv_eta, "kappa + 1/alpha", "1/eta");
        require_less(inv_eta, 2 * s.kappa, "1/eta", "2 kappa");
        if (std::isfinite(s.rho)) {
            require_less(std::max(0.0, 1.0 - inv_eta), s.rho, "max(0, 1 - 1/eta)", "rho");
            require_less(s.rho, alpha / (1.0 + alpha), "rho", "alpha/(1+alpha)");
        }
        break;
    case EvtClass::None: infeasible("no schedule for a deterministic weight");
    }
}

ExperimentKind parse_experiment_kind(std::string_view s) {
    if (s == "one-table") return ExperimentKind::OneTable;
    if (s == "two-table") return ExperimentKind::TwoTable;
    if (s == "basic") return ExperimentKind::Basic;
    if (s == "transitions") return ExperimentKind::Transitions;
    throw Error(ErrorKind::Parse, "unknown experiment '" + std::string(s) + "'");
}

const char* to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::OneTable: return "one-table";
    case ExperimentKind::TwoTable: return "two-table";
    case ExperimentKind::Basic: return "basic";
    case ExperimentKind::Transitions: return "transitions";
    }
    return "?";
}

namespace {

template <class T>
T get(const toml::node& n, std::string_view key) {
    if (auto v = n.value<T>()) return *v;
    throw Error(ErrorKind::Parse, "bad value for '" + std::string(key) + "'");
}

template <class T>
std::vector<T> get_array(const toml::node& n, std::string_view key) {
    const auto* arr = n.as_array();
    if (!arr) throw Error(ErrorKind::Parse, "'" + std::string(key) + "' must be an array");
    std::vector<T> out;
    for (const auto& el : *arr) out.push_back(get<T>(el, key));
    return out;
}

std::uint64_t get_count(const toml::node& n, std::string_view key) {
    const auto v = get<std::int64_t>(n, key);
    if (v < 0) throw Error(ErrorKind::Parse, "'" + std::string(key) + "' must be non-negative");
    return static_cast<std::uint64_t>(v);
}

} // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML: " << e.description() << " at line " << e.source().begin.line;
        throw Error(ErrorKind::Parse, os.str());
    }
    ExperimentConfig cfg;
    for (const auto& [k, node] : root) {
        const std::string_view key = k.str();
        if (key == "experiment") {
            cfg.kind = parse_experiment_kind(get<std::string>(node, key));
            cfg.kind_declared = true;
        }
        else if (key == "dist") cfg.spec = FitnessSpec::parse(get<std::string>(node, key));
        else if (key == "theta") cfg.theta = get<double>(node, key);
        else if (key == "seed") cfg.seed = get_count(node, key);
        else if (key == "replicas") cfg.replicas = get_count(node, key);
        else if (key == "t_grid") cfg.t_grid = get_array<double>(node, key);
        else if (key == "t_max") cfg.t_max = get<double>(node, key);
        else if (key == "n_grid") {
            cfg.n_grid.clear();
            for (auto v : get_array<std::int64_t>(node, key)) {
                if (v < 1) throw Error(ErrorKind::Parse, "n_grid entries must be positive");
                cfg.n_grid.push_back(static_cast<std::uint64_t>(v));
            }
        } else if (key == "threads") cfg.threads = static_cast<unsigned>(get_count(node, key));
        else if (key == "force") cfg.force = get<bool>(node, key);
        else if (key == "outside_theorem") cfg.outside_theorem = get<bool>(node, key);
        else if (key == "include_root_table") cfg.include_root_table = get<bool>(node, key);
        else if (key == "window") cfg.window = get_count(node, key);
        else if (key == "dip_window") cfg.dip_window = get<double>(node, key);
        else if (key == "min_change_n") cfg.min_change_n = get_count(node, key);
        else if (key == "schedule") {
            const auto* tab = node.as_table();
            if (!tab) throw Error(ErrorKind::Parse, "'schedule' must be a table");
            for (const auto& [sk, sn] : *tab) {
                const std::string_view s = sk.str();
                if (s == "eta") cfg.eta = get<double>(sn, s);
                else if (s == "kappa") cfg.kappa = get<double>(sn, s);
                else if (s == "phi") cfg.phi = get<double>(sn, s);
                else if (s == "rho") cfg.rho = get<double>(sn, s);
                else throw Error(ErrorKind::Parse, "unknown schedule key '" + std::string(s) + "'");
            }
        } else if (key == "checks") {
            const auto* tab = node.as_table();
            if (!tab) throw Error(ErrorKind::Parse, "'checks' must be a table");
            for (const auto& [ck, cn] : *tab) {
                const std::string_view c = ck.str();
                if (c == "median_share") cfg.median_share = get<double>(cn, c);
                else if (c == "path_fraction") cfg.path_fraction = get<double>(cn, c);
                else if (c == "separation_fraction") cfg.separation_fraction = get<double>(cn, c);
                else if (c == "kn_low") cfg.kn_low = get<double>(cn, c);
                else if (c == "kn_high") cfg.kn_high = get<double>(cn, c);
                else if (c == "dip_level") cfg.dip_level = get<double>(cn, c);
                else throw Error(ErrorKind::Parse, "unknown checks key '" + std::string(c) + "'");
            }
        } else {
            throw Error(ErrorKind::Parse, "unknown config key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

Schedule resolve_schedule(const ExperimentConfig& cfg) {
    Schedule s{kNaN, kNaN, kNaN, kNaN};
    try {
        s = default_schedule(cfg.spec);
    } catch (const Error&) {
        if (!cfg.outside_theorem) throw;
    }
    if (cfg.eta) s.eta = *cfg.eta;
    if (cfg.kappa) s.kappa = *cfg.kappa;
    if (cfg.phi) s.phi = *cfg.phi;
    if (cfg.rho) s.rho = *cfg.rho;
    if (cfg.outside_theorem) {
        if (!(s.eta > 0.0) || !(s.kappa > 0.0)) infeasible("outside-theorem runs need explicit eta and kappa");
    } else {
        validate_schedule(cfg.spec, s);
    }
    return s;
}

double expected_operations(const ExperimentConfig& cfg) {
    const double r = static_cast<double>(cfg.replicas);
    switch (cfg.kind) {
    case ExperimentKind::OneTable: {
        double sum = 0.0;
        for (double t : cfg.t_grid) sum += 1.0 + cfg.theta * t;
        return r * sum;
    }
    case ExperimentKind::TwoTable: {
        double sum = 0.0;
        for (double t : checkpoint_times(resolve_schedule(cfg), cfg.t_max)) sum += 1.0 + cfg.theta * t;
        return r * sum;
    }
    case ExperimentKind::Basic:
    case ExperimentKind::Transitions:
        return cfg.n_grid.empty() ? 0.0 : r * static_cast<double>(cfg.n_grid.back());
    }
    return 0.0;
}

void check_budget(const ExperimentConfig& cfg) {
    const double ops = expected_operations(cfg);
    if (ops > kBudget && !cfg.force)
        throw Error(ErrorKind::BudgetExceeded,
                    "configuration needs about " + num(ops) + " steps (limit 1e10); pass --force to run anyway");
}

bool ExperimentResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

DataTable checks_table(const std::vector<Check>& checks) {
    DataTable t({"check", "pass", "value", "threshold", "detail"});
    for (const auto& c : checks) t.add({c.name, c.pass, c.value, c.threshold, c.detail});
    return t;
}

ExperimentResult exp_one_table(const ExperimentConfig& cfg) {
    const auto seed = require_seed(cfg);
    if (cfg.t_grid.empty()) throw Error(ErrorKind::Parse, "one-table needs t_grid");
    if (!std::is_sorted(cfg.t_grid.begin(), cfg.t_grid.end()) ||
        std::adjacent_find(cfg.t_grid.begin(), cfg.t_grid.end()) != cfg.t_grid.end())
        throw Error(ErrorKind::Parse, "t_grid must be strictly increasing");
    check_budget(cfg);
    const unsigned threads = resolve_threads(cfg.threads);
    const bool root = cfg.include_root_table.value_or(false);

    struct Sample {
        bool empty;
        std::size_t tables;
        double share1;
        double log_deficit;
        double leader_s;
        double leader_y;
    };

    ExperimentResult res{DataTable({"t", "u_t", "v_t", "w_t", "replicas", "empty", "single_table", "q05", "q25", "q50",
                                "q75", "q95", "median_log_deficit", "leader_s_median", "leader_y_median"}),
                         {}};
    std::vector<double> medians;
    std::vector<double> deficit_medians;
    for (std::size_t g = 0; g < cfg.t_grid.size(); ++g) {
        const double t = cfg.t_grid[g];
        const auto tr = solve_scaling(cfg.spec, t);
        const auto samples = map_replicas(cfg.replicas, threads, [&](std::uint64_t i) {
            auto rng = make_rng(seed, kStreamOneTable + g, i);
            const auto r = snapshot(cfg.theta, cfg.spec, t, rng, {.include_root_table = root, .sample_sizes = true});
            if (r.table_count() == 0) return Sample{true, 0, kNaN, kNaN, kNaN, kNaN};
            const auto sh = share_summary(r);
            const auto& lead = r.tables()[static_cast<std::size_t>(sh.top_indices[0])];
            return Sample{false, r.table_count(), sh.share1, sh.log1m_share1, lead.tau / tr.u,
                          (lead.weight - tr.v) / tr.w};
        });
        std::vector<double> share, deficit, ls, ly;
        std::uint64_t empty = 0, single = 0;
        for (const auto& s : samples) {
            if (s.empty) {
                ++empty;
                continue;
            }
            if (s.tables == 1) ++single;
            share.push_back(s.share1);
            deficit.push_back(s.log_deficit);
            ls.push_back(s.leader_s);
            ly.push_back(s.leader_y);
        }
        const std::vector<double> ps{0.05, 0.25, 0.5, 0.75, 0.95};
        const auto q = quantiles(share, ps);
        medians.push_back(q[2]);
        deficit_medians.push_back(quantile(deficit, 0.5));
        res.table.add({t, tr.u, tr.v, tr.w, static_cast<std::int64_t>(cfg.replicas), static_cast<std::int64_t>(empty),
                       static_cast<std::int64_t>(single), q[0], q[1], q[2], q[3], q[4], deficit_medians.back(),
                       quantile(ls, 0.5), quantile(ly, 0.5)});
    }
    // Compared through log(1 - share), which stays resolved after the share rounds to 1.
    std::int64_t violations = 0;
    for (std::size_t g = 1; g < deficit_medians.size(); ++g)
        if (!(deficit_medians[g] < deficit_medians[g - 1])) ++violations;
    res.checks.push_back({"median_share_increasing", violations == 0, static_cast<double>(violations), 0.0,
                          "grid steps where the median leader share did not increase"});
    res.checks.push_back({"median_share_final", medians.back() >= cfg.median_share, medians.back(), cfg.median_share,
                          "median leader share at t = " + num(cfg.t_grid.back())});
    return res;
}

ExperimentResult exp_two_table(const ExperimentConfig& cfg) {
    const auto seed = require_seed(cfg);
    const Schedule sched = resolve_schedule(cfg);
    check_budget(cfg);
    const auto ts = checkpoint_times(sched, cfg.t_max);
    const std::size_t K = ts.size();
    if (K < 2 * cfg.window || cfg.window == 0)
        throw Error(ErrorKind::ScheduleInfeasible,
                    "schedule gives " + std::to_string(K) + " checkpoints; need at least " +
                        std::to_string(2 * std::max<std::size_t>(cfg.window, 1)));
    std::vector<std::optional<ScalingTriple>> triples;
    std::vector<double> threshold(K, kNaN);
    for (std::size_t k = 0; k < K; ++k) {
        triples.push_back(try_scaling(cfg.spec, ts[k]));
        if (triples[k]) threshold[k] = std::pow(ts[k], -sched.kappa) * ts[k] * triples[k]->w;
    }
    const unsigned threads = resolve_threads(cfg.threads);
    const bool root = cfg.include_root_table.value_or(true);

    struct Row {
        std::size_t tables;
        double share1;
        double share12;
        double one_minus_share12;
        double log1m_share12;
        double theta_gap;
        bool separated;
    };
    const auto paths = map_replicas(cfg.replicas, threads, [&](std::uint64_t i) {
        auto rng = make_rng(seed, kStreamTwoTable, i);
        auto r = snapshot(cfg.theta, cfg.spec, ts[0], rng, {.include_root_table = root, .sample_sizes = true});
        std::vector<Row> rows;
        rows.reserve(K);
        for (std::size_t k = 0; k < K; ++k) {
            if (k > 0) r.evolve(ts[k], rng);
            Row row{r.table_count(), kNaN, kNaN, kNaN, kNaN, kNaN, false};
            if (row.tables > 0) {
                const auto sh = share_summary(r);
                row.share1 = sh.share1;
                row.share12 = sh.share12;
                row.one_minus_share12 = std::exp(sh.log1m_share12);
                row.log1m_share12 = sh.log1m_share12;
            }
            if (row.tables >= 3) {
                double th[3] = {-1, -1, -1};
                for (const auto& tab : r.tables()) {
                    const double x = tab.weight * (r.t() - tab.tau);
                    if (x > th[0]) {
                        th[2] = th[1];
                        th[1] = th[0];
                        th[0] = x;
                    } else if (x > th[1]) {
                        th[2] = th[1];
                        th[1] = x;
                    } else if (x > th[2]) {
                        th[2] = x;
                    }
                }
                row.theta_gap = th[0] - th[2];
                row.separated = row.theta_gap > threshold[k];
            }
            rows.push_back(row);
        }
        return rows;
    });

    ExperimentResult res{DataTable({"replica", "k", "t", "tables", "share1", "share12", "one_minus_share12",
                                "log_one_minus_share12", "theta_gap", "threshold", "separated"}),
                         {}};
    std::uint64_t trend_ok = 0, eligible = 0, separated = 0;
    const std::size_t tail_start = K / 2;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        double first = -std::numeric_limits<double>::infinity();
        double last = first;
        for (std::size_t k = 0; k < K; ++k) {
            const auto& row = p[k];
            res.table.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(k + 1), ts[k],
                           static_cast<std::int64_t>(row.tables), row.share1, row.share12, row.one_minus_share12,
                           row.log1m_share12, row.theta_gap, threshold[k], row.separated});
            const double d = std::isnan(row.log1m_share12) ? -std::numeric_limits<double>::infinity() : row.log1m_share12;
            if (k < cfg.window) first = std::max(first, d);
            if (k >= K - cfg.window) last = std::max(last, d);
            if (k >= tail_start && triples[k] && row.tables >= 3) {
                ++eligible;
                if (row.separated) ++separated;
            }
        }
        if (last < first) ++trend_ok;
    }
    const double trend_frac = fraction(trend_ok, paths.size());
    res.checks.push_back({"deficit_decreases_along_path", trend_frac >= cfg.path_fraction, trend_frac,
                          cfg.path_fraction,
                          "paths whose max of 1 - share12 over the last " + std::to_string(cfg.window) +
                              " checkpoints is below the max over the first " + std::to_string(cfg.window)});
    const double sep_frac = fraction(separated, eligible);
    res.checks.push_back({"exponent_gap_separated", sep_frac > cfg.separation_fraction, sep_frac,
                          cfg.separation_fraction,
                          "tail-half checkpoints with Theta1 - Theta3 > lambda t w (" + std::to_string(eligible) +
                              " eligible)"});
    return res;
}

namespace {

void check_n_grid(const ExperimentConfig& cfg) {
    if (cfg.n_grid.empty()) throw Error(ErrorKind::Parse, "n_grid is required");
    if (!std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end()) ||
        std::adjacent_find(cfg.n_grid.begin(), cfg.n_grid.end()) != cfg.n_grid.end())
        throw Error(ErrorKind::Parse, "n_grid must be strictly increasing");
}

} // namespace

ExperimentResult exp_basic(const ExperimentConfig& cfg) {
    const auto seed = require_seed(cfg);
    check_n_grid(cfg);
    check_budget(cfg);
    const unsigned threads = resolve_threads(cfg.threads);
    const DiscreteConfig dc{cfg.theta, cfg.spec, cfg.n_grid.back(), cfg.n_grid};
    const auto paths = map_replicas(cfg.replicas, threads, [&](std::uint64_t i) {
        auto rng = make_rng(seed, kStreamBasic, i);
        return run_discrete(dc, rng);
    });

    ExperimentResult res{
        DataTable({"replica", "n", "K_n", "K_over_log_n", "table0_share", "leader_birth", "share1"}), {}};
    const std::size_t G = cfg.n_grid.size();
    std::vector<std::vector<double>> kn(G), births(G), table0(G);
    std::uint64_t table0_down = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t g = 0; g < G; ++g) {
            const auto& rec = paths[i][g];
            const double ratio = static_cast<double>(rec.tables) / std::log(static_cast<double>(rec.n));
            kn[g].push_back(ratio);
            births[g].push_back(static_cast<double>(rec.leader_birth));
            table0[g].push_back(rec.table0_share);
            res.table.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(rec.n),
                           static_cast<std::int64_t>(rec.tables), ratio, rec.table0_share,
                           static_cast<std::int64_t>(rec.leader_birth), rec.share1});
        }
        if (paths[i].back().table0_share < paths[i].front().table0_share) ++table0_down;
    }
    const double median_last = quantile(kn.back(), 0.5);
    const double essup = cfg.spec.essential_sup();
    if (std::isfinite(essup)) {
        const double target = cfg.theta / essup;
        const bool ok = median_last >= cfg.kn_low * target && median_last <= cfg.kn_high * target;
        res.checks.push_back({"K_over_log_n_band", ok, median_last, target,
                              "median K_n / log n at n = " + std::to_string(cfg.n_grid.back()) + " within [" +
                                  num(cfg.kn_low) + ", " + num(cfg.kn_high) + "] x theta / essup"});
    } else {
        std::int64_t violations = 0;
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < G; ++g) {
            if (cfg.n_grid[g] < 2) continue;
            const double m = quantile(kn[g], 0.5);
            if (!(m < prev)) ++violations;
            prev = m;
        }
        res.checks.push_back({"K_over_log_n_decreasing", violations == 0, static_cast<double>(violations), 0.0,
                              "grid steps where the median K_n / log n did not decrease"});
    }
    if (G >= 2) {
        std::int64_t t0_violations = 0;
        for (std::size_t g = 1; g < G; ++g)
            if (!(quantile(table0[g], 0.5) < quantile(table0[g - 1], 0.5))) ++t0_violations;
        res.checks.push_back({"table0_share_decreases", t0_violations == 0, static_cast<double>(t0_violations), 0.0,
                              "grid steps where the median first-table share did not decrease (" +
                                  num(fraction(table0_down, paths.size())) + " of replicas below their n = " +
                                  std::to_string(cfg.n_grid.front()) + " value at the end)"});
        const double b_first = quantile(births.front(), 0.5);
        const double b_last = quantile(births.back(), 0.5);
        res.checks.push_back({"leader_birth_grows", b_last > b_first, b_last, b_first,
                              "median leader birth at the last checkpoint against the first"});
    }
    return res;
}

ExperimentResult exp_leader_transitions(const ExperimentConfig& cfg) {
    const auto seed = require_seed(cfg);
    check_n_grid(cfg);
    check_budget(cfg);
    const unsigned threads = resolve_threads(cfg.threads);
    const std::uint64_t n_max = cfg.n_grid.back();

    struct Event {
        std::uint64_t n;
        std::size_t old_leader, new_leader;
        double old_weight, new_weight;
        std::uint64_t old_birth, new_birth;
        double share_at_change;
        double dip;
        std::uint64_t window_end;
    };
    const auto paths = map_replicas(cfg.replicas, threads, [&](std::uint64_t i) {
        auto rng = make_rng(seed, kStreamTransitions, i);
        Restaurant r(cfg.theta, cfg.spec, rng);
        std::vector<Event> events;
        std::size_t open_from = 0; // events before this index have closed windows
        while (r.n() < n_max) {
            const auto ev = r.step(rng);
            const double share = static_cast<double>(r.size(r.leader())) / static_cast<double>(r.n());
            if (ev.leader_changed && r.n() >= cfg.min_change_n) {
                const auto end = static_cast<std::uint64_t>(std::ceil(static_cast<double>(r.n()) * (1.0 + cfg.dip_window)));
                events.push_back({r.n(), ev.previous_leader, r.leader(), r.weight(ev.previous_leader),
                                  r.weight(r.leader()), r.birth(ev.previous_leader), r.birth(r.leader()), share, share,
                                  end});
            }
            for (std::size_t e = open_from; e < events.size(); ++e)
                if (r.n() <= events[e].window_end) events[e].dip = std::min(events[e].dip, share);
            while (open_from < events.size() && events[open_from].window_end <= r.n()) ++open_from;
        }
        return events;
    });

    ExperimentResult res{DataTable({"replica", "n", "old_leader", "new_leader", "old_weight", "new_weight", "old_birth",
                                "new_birth", "share_at_change", "dip", "window_complete"}),
                         {}};
    std::uint64_t same = 0, complete = 0, deep = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (const auto& e : paths[i]) {
            const bool done = e.window_end <= n_max;
            res.table.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(e.n),
                           static_cast<std::int64_t>(e.old_leader), static_cast<std::int64_t>(e.new_leader),
                           e.old_weight, e.new_weight, static_cast<std::int64_t>(e.old_birth),
                           static_cast<std::int64_t>(e.new_birth), e.share_at_change, e.dip, done});
            if (e.old_leader == e.new_leader) ++same;
            if (done) {
                ++complete;
                if (e.dip < cfg.dip_level) ++deep;
            }
        }
    }
    res.checks.push_back({"leaders_distinct", same == 0, static_cast<double>(same), 0.0,
                          "changes whose old and new leader coincide"});
    const double frac = fraction(deep, complete);
    res.checks.push_back({"dip_below_level", complete == 0 || frac > 0.5, complete ? frac : kNaN, 0.5,
                          complete ? std::to_string(complete) + " changes with a complete window; dip level " +
                                         num(cfg.dip_level)
                                   : "no leadership change observed"});
    return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
    case ExperimentKind::OneTable: return exp_one_table(cfg);
    case ExperimentKind::TwoTable: return exp_two_table(cfg);
    case ExperimentKind::Basic: return exp_basic(cfg);
    case ExperimentKind::Transitions: return exp_leader_transitions(cfg);
    }
    throw Error(ErrorKind::Domain, "unknown experiment");
}

std::string config_library_version() {
    return "toml++ " + std::to_string(TOML_LIB_MAJOR) + "." + std::to_string(TOML_LIB_MINOR) + "." +
           std::to_string(TOML_LIB_PATCH);
}

} // namespace dcrp
