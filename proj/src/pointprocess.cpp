#include "dcrp/pointprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcrp/error.hpp"
#include "dcrp/parallel.hpp"
#include "dcrp/quadrature.hpp"

namespace dcrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kStreamTopExponent = 0x7831;
constexpr std::uint64_t kStreamGap = 0x6761;

// Largest y with v + y w inside the support.
double y_ceiling(const FitnessSpec& spec, const ScalingTriple& tr) {
    return spec.bounded() ? tr.v_gap / tr.w : kInf;
}

// Weight level v + z w, written through the gap for bounded entries.
double weight_at(const FitnessSpec& spec, const ScalingTriple& tr, double z) {
    return spec.bounded() ? spec.essential_sup() - (tr.v_gap - z * tr.w) : tr.v + z * tr.w;
}

// Upper endpoint of the s-range in the limit: [0, 1) for Frechet, unbounded otherwise.
double s_ceiling(const FitnessSpec& spec) { return spec.evt_class() == EvtClass::Frechet ? 1.0 : kInf; }

} // namespace

double pi_At(double theta, const FitnessSpec& spec, const ScalingTriple& tr, double x) {
    const double base = weight_at(spec, tr, x);
    if (!(base > 0.0)) throw Error(ErrorKind::Domain, "pi_At needs x > -v_t / w_t");
    const double upper = y_ceiling(spec, tr);
    if (x >= upper) return 0.0;
    auto f = [&](double z) {
        const double level = weight_at(spec, tr, z);
        return phi_t(spec, tr, z) / (level * level);
    };
    // Phi_t has a kink where v + z w crosses the lower edge of the support (Pareto).
    std::vector<double> kinks;
    if (spec.kind() == FitnessKind::FrechetPareto) kinks.push_back((1.0 - tr.v) / tr.w);
    const double integral = integrate(f, x, upper, kinks).value;
    return theta * base * (tr.t * tr.w / tr.u) * integral;
}

double pi_At_difference_bound(double theta, const FitnessSpec& spec, const ScalingTriple& tr, double x, double eps) {
    const double base = weight_at(spec, tr, x);
    if (!(base > 0.0)) throw Error(ErrorKind::Domain, "pi_At needs x > -v_t / w_t");
    return eps * theta * (tr.t * tr.w / tr.u) * phi_t(spec, tr, x) / base;
}

BoxPrediction box_prediction(double theta, const FitnessSpec& spec, const ScalingTriple& tr, const BoxSpec& box) {
    if (!(box.a >= 0.0)) throw Error(ErrorKind::Domain, "box needs a >= 0");
    if (spec.evt_class() == EvtClass::Frechet && !(box.b > 0.0))
        throw Error(ErrorKind::Domain, "Frechet boxes need b > 0");
    BoxPrediction p{};
    const double s_max = std::min(box.a, tr.t / tr.u);
    const double s_lim = std::min(box.a, s_ceiling(spec));
    if (!box.c) {
        p.mean_finite = theta * s_max * phi_t(spec, tr, box.b);
        p.mean_limit = theta * s_lim * phi_limit(spec, box.b);
    } else {
        const double c = *box.c;
        // Exponent coordinate (W (t - s u) - t v) / (t w) >= c  <=>  y >= y_c(s).
        auto y_c = [&](double s) {
            const double rest = tr.t - s * tr.u;
            return rest > 0.0 ? (c * tr.t * tr.w + tr.v * s * tr.u) / (tr.w * rest) : kInf;
        };
        std::vector<double> kink;
        const double s_star = tr.t * tr.w * (box.b - c) / (tr.u * (tr.v + box.b * tr.w));
        if (s_star > 0.0 && s_star < s_max) kink.push_back(s_star);
        p.mean_finite = s_max > 0.0
            ? theta * integrate([&](double s) { return phi_t(spec, tr, std::max(box.b, y_c(s))); }, 0.0, s_max, kink).value
            : 0.0;

        const bool frechet = spec.evt_class() == EvtClass::Frechet;
        auto g = [&](double s) { return frechet ? c / (1.0 - s) : c + s; };
        std::vector<double> kink_lim;
        const double s_lim_star = frechet ? 1.0 - c / box.b : box.b - c;
        if (s_lim_star > 0.0 && s_lim_star < s_lim) kink_lim.push_back(s_lim_star);
        p.mean_limit = s_lim > 0.0
            ? theta * integrate([&](double s) { return phi_limit(spec, std::max(box.b, g(s))); }, 0.0, s_lim, kink_lim).value
            : 0.0;
    }
    p.void_finite = std::exp(-p.mean_finite);
    p.void_limit = std::exp(-p.mean_limit);
    return p;
}

VoidProbability void_probability(double theta, const FitnessSpec& spec, const ScalingTriple& tr, const BoxSpec& box) {
    const auto p = box_prediction(theta, spec, tr, box);
    return {p.void_finite, p.void_limit};
}

std::uint64_t count_in_box(const PointMeasure& pm, const BoxSpec& box) {
    return static_cast<std::uint64_t>(std::count_if(pm.begin(), pm.end(), [&](const Point& p) {
        return p.s <= box.a && p.y >= box.b && (!box.c || p.z >= *box.c);
    }));
}

BoxComparison empirical_compare(std::span<const std::uint64_t> counts, const BoxPrediction& pred) {
    if (counts.size() < 100) throw Error(ErrorKind::Domain, "empirical_compare needs at least 100 replicas");
    BoxComparison r{};
    r.replicas = counts.size();
    std::vector<double> xs(counts.begin(), counts.end());
    const auto ms = mean_se(xs);
    r.empirical_mean = ms.mean;
    r.se = ms.se;
    r.z = z_score(ms.mean, pred.mean_limit, ms.se);
    r.z_finite = z_score(ms.mean, pred.mean_finite, ms.se);
    const auto voids = static_cast<std::uint64_t>(std::count(counts.begin(), counts.end(), std::uint64_t{0}));
    const double n = static_cast<double>(r.replicas);
    r.empirical_void = static_cast<double>(voids) / n;
    r.void_interval = wilson_interval(voids, r.replicas);
    r.void_se = std::sqrt(pred.void_limit * (1.0 - pred.void_limit) / n);
    r.z_void = z_score(r.empirical_void, pred.void_limit, r.void_se);
    r.z_void_finite =
        z_score(r.empirical_void, pred.void_finite, std::sqrt(pred.void_finite * (1.0 - pred.void_finite) / n));
    return r;
}

BoxComparison empirical_compare(std::span<const PointMeasure> samples, const BoxSpec& box, const BoxPrediction& pred) {
    std::vector<std::uint64_t> counts;
    counts.reserve(samples.size());
    for (const auto& pm : samples) counts.push_back(count_in_box(pm, box));
    return empirical_compare(counts, pred);
}

std::vector<double> sample_top_exponent(double theta, const FitnessSpec& spec, double t, std::uint64_t replicas,
                                        std::uint64_t seed, unsigned threads) {
    const auto tr = solve_scaling(spec, t);
    return map_replicas(replicas, threads, [&](std::uint64_t i) {
        auto rng = make_rng(seed, kStreamTopExponent, i);
        const auto r = snapshot(theta, spec, t, rng, {.include_root_table = false, .sample_sizes = false});
        const auto view = exponent_view(r, tr);
        return view.argmax[0] < 0 ? -kInf : view.xi_top[0];
    });
}

std::vector<VoidIdentityRow> void_identity_compare(double theta, const FitnessSpec& spec, double t,
                                                   std::span<const double> xs, std::uint64_t replicas,
                                                   std::uint64_t seed, unsigned threads) {
    const auto tr = solve_scaling(spec, t);
    const auto top = sample_top_exponent(theta, spec, t, replicas, seed, threads);
    std::vector<VoidIdentityRow> rows;
    const double n = static_cast<double>(replicas);
    for (double x : xs) {
        VoidIdentityRow row{};
        row.x = x;
        row.predicted = std::exp(-pi_At(theta, spec, tr, x));
        row.empirical = static_cast<double>(std::count_if(top.begin(), top.end(), [&](double v) { return v <= x; })) / n;
        row.se = std::sqrt(row.predicted * (1.0 - row.predicted) / n);
        row.z = z_score(row.empirical, row.predicted, row.se);
        rows.push_back(row);
    }
    return rows;
}

GapReport gap_probabilities(double theta, const FitnessSpec& spec, double t, std::span<const double> lambdas,
                            std::uint64_t replicas, std::uint64_t seed, unsigned threads) {
    const auto tr = solve_scaling(spec, t);
    const auto gaps = map_replicas(replicas, threads, [&](std::uint64_t i) {
        auto rng = make_rng(seed, kStreamGap, i);
        const auto r = snapshot(theta, spec, t, rng, {.include_root_table = false, .sample_sizes = false});
        const auto view = exponent_view(r, tr);
        return view.too_few_tables ? std::numeric_limits<double>::quiet_NaN() : view.xi_top[0] - view.xi_top[2];
    });
    GapReport rep{t, replicas, 0, {}};
    rep.too_few = static_cast<std::uint64_t>(std::count_if(gaps.begin(), gaps.end(), [](double g) { return std::isnan(g); }));
    if (static_cast<double>(rep.too_few) > 0.1 * static_cast<double>(replicas))
        throw Error(ErrorKind::TooFewTables, "more than 10% of replicas have fewer than three tables");
    for (double lambda : lambdas) {
        GapRow row{};
        row.lambda = lambda;
        row.used = replicas - rep.too_few;
        row.hits = static_cast<std::uint64_t>(
            std::count_if(gaps.begin(), gaps.end(), [&](double g) { return !std::isnan(g) && g <= lambda; }));
        row.frequency = row.used ? static_cast<double>(row.hits) / static_cast<double>(row.used) : 0.0;
        row.wilson = wilson_interval(row.hits, row.used);
        row.ratio = lambda > 0.0 ? row.frequency / (lambda * lambda) : std::numeric_limits<double>::quiet_NaN();
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace dcrp
