#include "dcrp/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dcrp/error.hpp"

namespace dcrp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Creation times of a Poisson segment on (from, to): Poisson count, then sorted uniforms.
std::vector<double> poisson_times(double theta, double from, double to, Rng& rng) {
    std::poisson_distribution<std::int64_t> count(theta * (to - from));
    const auto m = static_cast<std::size_t>(count(rng));
    std::vector<double> times(m);
    for (auto& x : times) x = from + (to - from) * uniform_open(rng);
    std::sort(times.begin(), times.end());
    return times;
}

template <class Key>
std::array<std::int64_t, 3> top3(std::size_t n, Key key) {
    std::array<std::int64_t, 3> best{-1, -1, -1};
    for (std::size_t i = 0; i < n; ++i) {
        const double v = key(i);
        auto better = [&](std::int64_t j) { return j < 0 || v > key(static_cast<std::size_t>(j)); };
        if (better(best[0])) {
            best = {static_cast<std::int64_t>(i), best[0], best[1]};
        } else if (better(best[1])) {
            best[2] = best[1];
            best[1] = static_cast<std::int64_t>(i);
        } else if (better(best[2])) {
            best[2] = static_cast<std::int64_t>(i);
        }
    }
    return best;
}

} // namespace

ContinuousRestaurant snapshot(double theta, const FitnessSpec& spec, double t, Rng& rng, SnapshotOptions options) {
    if (!(theta > 0.0)) throw Error(ErrorKind::Domain, "theta must be positive");
    if (!(t > 0.0)) throw Error(ErrorKind::Domain, "snapshot needs t > 0");
    std::vector<Table> tables;
    std::vector<double> taus = poisson_times(theta, 0.0, t, rng);
    if (options.include_root_table) taus.insert(taus.begin(), 0.0);
    tables.reserve(taus.size());
    for (double tau : taus) {
        const double w = sample(spec, rng);
        const auto y = options.sample_sizes ? yule_sample(w * (t - tau), rng) : YuleState::exact(1, 0.0);
        tables.push_back({tau, w, y});
    }
    return {theta, spec, t, std::move(tables), options.sample_sizes};
}

void ContinuousRestaurant::evolve(double t_next, Rng& rng) {
    if (!sizes_sampled_) throw Error(ErrorKind::Domain, "cannot evolve a restaurant whose sizes were not sampled");
    if (!(t_next >= t_)) throw Error(ErrorKind::Domain, "evolve needs t_next >= t");
    if (t_next == t_) return;
    const double dt = t_next - t_;
    for (auto& tab : tables_) tab.yule = yule_extend(tab.yule, tab.weight * dt, rng);
    for (double tau : poisson_times(theta_, t_, t_next, rng)) {
        const double w = sample(spec_, rng);
        tables_.push_back({tau, w, yule_sample(w * (t_next - tau), rng)});
    }
    t_ = t_next;
}

double ContinuousRestaurant::log_total_size() const {
    if (tables_.empty()) return kNegInf;
    double mx = kNegInf;
    for (const auto& tab : tables_) mx = std::max(mx, tab.yule.log_size());
    double acc = 0.0;
    for (const auto& tab : tables_) acc += std::exp(tab.yule.log_size() - mx);
    return mx + std::log(acc);
}

ShareSummary share_summary(const ContinuousRestaurant& r) {
    ShareSummary out{};
    const auto& tabs = r.tables();
    out.tables = tabs.size();
    out.top_indices = top3(tabs.size(), [&](std::size_t i) { return tabs[i].yule.log_size(); });
    for (int j = 0; j < 3; ++j)
        out.top_log_sizes[j] = out.top_indices[j] < 0 ? kNegInf : tabs[out.top_indices[j]].yule.log_size();
    if (tabs.empty()) {
        out.log_total = kNegInf;
        out.share1 = out.share12 = out.log1m_share1 = out.log1m_share12 = kNaN;
        return out;
    }
    const double l1 = out.top_log_sizes[0];
    const double l2 = out.top_log_sizes[1];
    const double l3 = out.top_log_sizes[2];
    // Tail sums are taken relative to the second and third largest tables so
    // that gaps beyond the double range still give finite logs.
    double acc1 = 0.0;
    double acc2 = 0.0;
    for (std::size_t i = 0; i < tabs.size(); ++i) {
        const auto idx = static_cast<std::int64_t>(i);
        if (idx == out.top_indices[0]) continue;
        const double l = tabs[i].yule.log_size();
        acc1 += std::exp(l - l2);
        if (idx != out.top_indices[1]) acc2 += std::exp(l - l3);
    }
    const double log_rest1 = tabs.size() > 1 ? (l2 - l1) + std::log(acc1) : kNegInf;
    const double log_rest2 = tabs.size() > 2 ? (l3 - l1) + std::log(acc2) : kNegInf;
    const double rest1 = std::exp(log_rest1);
    const double rest2 = std::exp(log_rest2);
    out.log_total = l1 + std::log1p(rest1);
    out.share1 = 1.0 / (1.0 + rest1);
    out.share12 = (1.0 + (rest1 - rest2)) / (1.0 + rest1);
    out.log1m_share1 = log_rest1 - std::log1p(rest1);
    out.log1m_share12 = log_rest2 - std::log1p(rest1);
    return out;
}

ExponentView exponent_view(const ContinuousRestaurant& r, const ScalingTriple& tr) {
    ExponentView v{};
    const auto& tabs = r.tables();
    const double t = r.t();
    v.theta.reserve(tabs.size());
    v.xi.reserve(tabs.size());
    for (const auto& tab : tabs) {
        const double th = tab.weight * (t - tab.tau);
        v.theta.push_back(th);
        v.xi.push_back((th - t * tr.v) / (t * tr.w));
    }
    v.argmax = top3(tabs.size(), [&](std::size_t i) { return v.theta[i]; });
    for (int j = 0; j < 3; ++j) {
        v.theta_top[j] = v.argmax[j] < 0 ? kNaN : v.theta[v.argmax[j]];
        v.xi_top[j] = v.argmax[j] < 0 ? kNaN : v.xi[v.argmax[j]];
    }
    v.too_few_tables = tabs.size() < 3;
    return v;
}

PointMeasure gamma_measure(const ContinuousRestaurant& r, const ScalingTriple& tr) {
    PointMeasure pm;
    pm.reserve(r.table_count());
    const double t = r.t();
    const auto& tabs = r.tables();
    for (std::size_t i = 0; i < tabs.size(); ++i) {
        const auto& tab = tabs[i];
        pm.push_back({i, tab.tau, tab.weight, tab.tau / tr.u, (tab.weight - tr.v) / tr.w,
                      (tab.yule.log_size() - t * tr.v) / (t * tr.w)});
    }
    return pm;
}

} // namespace dcrp
