#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/poisson.hpp>

#include "doctest.h"
#include "helpers.hpp"

#include "dcrp/continuous.hpp"
#include "dcrp/stats.hpp"

using namespace dcrp;

namespace {

// Pearson statistic of integer samples against Poisson(mean), pooling sparse tails.
std::pair<double, double> poisson_chi_square(const std::vector<std::size_t>& xs, double mean) {
    boost::math::poisson_distribution<> law(mean);
    const double n = static_cast<double>(xs.size());
    const auto lo = static_cast<std::size_t>(boost::math::quantile(law, 0.002));
    const auto hi = static_cast<std::size_t>(boost::math::quantile(law, 0.998));
    std::vector<double> obs(hi - lo + 1, 0.0), exp(hi - lo + 1, 0.0);
    for (auto x : xs) obs[std::clamp(x, lo, hi) - lo] += 1;
    for (std::size_t k = lo; k <= hi; ++k) {
        double p = boost::math::pdf(law, static_cast<double>(k));
        if (k == lo) p = boost::math::cdf(law, static_cast<double>(k));
        if (k == hi) p = boost::math::cdf(boost::math::complement(law, static_cast<double>(k) - 1));
        exp[k - lo] = n * p;
    }
    return {chi_square_statistic(obs, exp), chi_square_critical(0.01, static_cast<double>(obs.size() - 1))};
}

Table table_at(double tau, double w, double t, std::uint64_t count) {
    return {tau, w, YuleState::exact(count, w * (t - tau))};
}

} // namespace

TEST_CASE("tiny horizons are usually empty") {
    auto rng = make_rng(31);
    int empty = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto r = snapshot(1.0, FitnessSpec::weibull(2), 1e-9, rng);
        empty += r.table_count() == 0;
        if (r.table_count() == 0) CHECK(std::isinf(r.log_total_size()));
    }
    CHECK(empty == 1000);
}

TEST_CASE("table count is Poisson(theta t)") {
    std::vector<double> m;
    std::vector<std::size_t> mi;
    for (std::uint64_t rep = 0; rep < 10000; ++rep) {
        auto rng = make_rng(32, 0, rep);
        const auto r = snapshot(2.0, FitnessSpec::weibull(2), 10.0, rng, {false, false});
        m.push_back(static_cast<double>(r.table_count()));
        mi.push_back(r.table_count());
    }
    CHECK(testing::mc_z_known(m, 20.0, 20.0) < 3.0);
    const auto [stat, crit] = poisson_chi_square(mi, 20.0);
    CHECK(stat < crit);
}

TEST_CASE("snapshot structure") {
    auto rng = make_rng(33);
    const double t = 50;
    const auto r = snapshot(1.0, FitnessSpec::frechet(1), t, rng, {true, true});
    REQUIRE(r.table_count() >= 1);
    CHECK(r.tables()[0].tau == 0.0);
    for (std::size_t i = 0; i < r.table_count(); ++i) {
        const auto& tb = r.tables()[i];
        CHECK(tb.tau >= 0.0);
        CHECK(tb.tau <= t);
        if (i > 0) CHECK(tb.tau > r.tables()[i - 1].tau);
        CHECK(tb.yule.elapsed() == doctest::Approx(tb.weight * (t - tb.tau)).epsilon(1e-9));
    }
    CHECK(std::exp(r.log_total_size()) >= static_cast<double>(r.table_count()) * (1 - 1e-12));
}

TEST_CASE("evolve to the same time is the identity") {
    auto rng = make_rng(34);
    auto r = snapshot(1.0, FitnessSpec::weibull(2), 20.0, rng);
    const auto before = r.tables();
    r.evolve(20.0, rng);
    REQUIRE(r.tables().size() == before.size());
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(r.tables()[i].yule.log_size() == before[i].yule.log_size());
}

TEST_CASE("evolve from 5 to 10 agrees with a snapshot at 10") {
    std::vector<std::size_t> evolved, direct;
    for (std::uint64_t rep = 0; rep < 10000; ++rep) {
        auto rng = make_rng(35, 0, rep);
        auto r = snapshot(1.0, FitnessSpec::gumbel_unbounded(2), 5.0, rng);
        r.evolve(10.0, rng);
        evolved.push_back(r.table_count());
        auto rng2 = make_rng(35, 1, rep);
        direct.push_back(snapshot(1.0, FitnessSpec::gumbel_unbounded(2), 10.0, rng2).table_count());
    }
    auto [s1, c1] = poisson_chi_square(evolved, 10.0);
    auto [s2, c2] = poisson_chi_square(direct, 10.0);
    CHECK(s1 < c1);
    CHECK(s2 < c2);
    std::vector<double> a(evolved.begin(), evolved.end()), b(direct.begin(), direct.end());
    CHECK(ks_statistic(a, b) < ks_critical(0.01, a.size(), b.size()));
}

TEST_CASE("evolved log sizes match snapshot log sizes of the leader") {
    std::vector<double> ev, sn;
    const auto spec = FitnessSpec::weibull(2);
    for (std::uint64_t rep = 0; rep < 3000; ++rep) {
        auto rng = make_rng(36, 0, rep);
        auto r = snapshot(1.0, spec, 4.0, rng);
        r.evolve(8.0, rng);
        if (r.table_count() > 0) ev.push_back(share_summary(r).share1);
        auto rng2 = make_rng(36, 1, rep);
        const auto direct = snapshot(1.0, spec, 8.0, rng2);
        if (direct.table_count() > 0) sn.push_back(share_summary(direct).share1);
    }
    CHECK(ks_statistic(ev, sn) < ks_critical(0.01, ev.size(), sn.size()));
}

TEST_CASE("evolution never shrinks tables") {
    auto rng = make_rng(37);
    auto r = snapshot(1.0, FitnessSpec::weibull(2), 5.0, rng, {true, true});
    double prev_total = r.log_total_size();
    std::size_t prev_m = r.table_count();
    for (double t = 6; t <= 60; t += 1.5) {
        const auto before = r.tables();
        r.evolve(t, rng);
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(r.tables()[i].yule.log_size() >= before[i].yule.log_size());
            CHECK(r.tables()[i].yule.elapsed() == doctest::Approx(r.tables()[i].weight * (t - r.tables()[i].tau)).epsilon(1e-9));
        }
        CHECK(r.table_count() >= prev_m);
        CHECK(r.log_total_size() >= prev_total);
        prev_m = r.table_count();
        prev_total = r.log_total_size();
    }
}

TEST_CASE("exponent view arithmetic") {
    const double t = 10;
    const auto spec = FitnessSpec::weibull(2);
    const auto tr = solve_scaling(spec, t);

    ContinuousRestaurant one(1.0, spec, t, {table_at(0, 0.6, t, 1)}, true);
    auto v1 = exponent_view(one, tr);
    CHECK(v1.theta_top[0] == doctest::Approx(0.6 * t));
    CHECK(v1.too_few_tables);
    CHECK(v1.argmax[1] == -1);

    ContinuousRestaurant two(1.0, spec, t, {table_at(0, 1, t, 1), table_at(t / 2, 3, t, 1)}, true);
    auto v2 = exponent_view(two, tr);
    CHECK(v2.theta_top[0] == doctest::Approx(1.5 * t));
    CHECK(v2.argmax[0] == 1);
    CHECK(v2.argmax[1] == 0);

    for (std::size_t i = 0; i < 2; ++i) {
        const auto& tb = two.tables()[i];
        CHECK(v2.xi[i] == doctest::Approx((tb.weight * (t - tb.tau) - t) / (t * std::pow(t, -1.0 / 3))));
    }
}

TEST_CASE("order statistics agree between Theta and xi") {
    const auto spec = FitnessSpec::frechet(1.5);
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        auto rng = make_rng(38, 0, rep);
        const auto r = snapshot(1.0, spec, 30, rng);
        const auto v = exponent_view(r, solve_scaling(spec, 30));
        if (v.too_few_tables) continue;
        CHECK(v.theta_top[0] >= v.theta_top[1]);
        CHECK(v.theta_top[1] >= v.theta_top[2]);
        for (int k = 0; k < 3; ++k) {
            const auto idx = static_cast<std::size_t>(v.argmax[k]);
            CHECK(v.theta[idx] == v.theta_top[k]);
            CHECK(v.xi[idx] == v.xi_top[k]);
        }
        const auto it = std::max_element(v.xi.begin(), v.xi.end());
        CHECK(static_cast<std::int64_t>(it - v.xi.begin()) == v.argmax[0]);
    }
}

TEST_CASE("point measure coordinates") {
    const double t = 100;
    const auto spec = FitnessSpec::gumbel_unbounded(2);
    const auto tr = solve_scaling(spec, t);
    const double big = 60.0 / (t - 10);
    std::vector<Table> tabs{{5, 0.8, YuleState::exact(1, 0.8 * 95)},
                            {10, big, YuleState::log_mode(0.37, big * 90)}};
    ContinuousRestaurant r(1.0, spec, t, tabs, true);
    const auto pm = gamma_measure(r, tr);
    const auto ev = exponent_view(r, tr);
    REQUIRE(pm.size() == 2);
    CHECK(pm[0].z == doctest::Approx((0 - t * tr.v) / (t * tr.w)));
    CHECK(pm[0].s == doctest::Approx(5 / tr.u));
    CHECK(pm[0].y == doctest::Approx((0.8 - tr.v) / tr.w));
    CHECK(pm[1].z - ev.xi[1] == doctest::Approx(std::log(0.37) / (t * tr.w)));
}

TEST_CASE("share summary by hand") {
    const double t = 3;
    std::vector<Table> tabs{table_at(0, 1, t, 5), table_at(1, 1, t, 2), table_at(2, 1, t, 3)};
    ContinuousRestaurant r(1.0, FitnessSpec::weibull(2), t, tabs, true);
    const auto s = share_summary(r);
    CHECK(s.tables == 3);
    CHECK(s.top_indices[0] == 0);
    CHECK(s.top_indices[1] == 2);
    CHECK(s.top_indices[2] == 1);
    CHECK(s.log_total == doctest::Approx(std::log(10.0)));
    CHECK(s.share1 == doctest::Approx(0.5));
    CHECK(s.share12 == doctest::Approx(0.8));
    CHECK(s.log1m_share1 == doctest::Approx(std::log(0.5)));
    CHECK(s.log1m_share12 == doctest::Approx(std::log(0.2)));

    ContinuousRestaurant single(1.0, FitnessSpec::weibull(2), t, {table_at(0, 1, t, 4)}, true);
    const auto s1 = share_summary(single);
    CHECK(s1.share1 == 1.0);
    CHECK(s1.share12 == 1.0);
    CHECK(std::isinf(s1.log1m_share1));
}

TEST_CASE("share summary stays resolved past double precision") {
    std::vector<Table> tabs{{0, 1, YuleState::log_mode(1, 1e5)},
                            {0, 1, YuleState::log_mode(1, 1e5 - 2000)},
                            {0, 1, YuleState::log_mode(1, 1e5 - 2000)},
                            {0, 1, YuleState::log_mode(1, 1e5 - 3000)}};
    ContinuousRestaurant r(1.0, FitnessSpec::frechet(1), 1e5, tabs, true);
    const auto s = share_summary(r);
    CHECK(s.share1 == 1.0);
    CHECK(s.log1m_share1 == doctest::Approx(-2000 + std::log(2.0)).epsilon(1e-12));
    CHECK(s.log1m_share12 == doctest::Approx(-2000).epsilon(1e-12));
    CHECK(std::isfinite(s.log_total));
}

TEST_CASE("Frechet boxes hold theta a Phi(b) tables on average") {
    const double t = 1000;
    const auto spec = FitnessSpec::frechet(1);
    const auto tr = solve_scaling(spec, t);
    std::vector<double> counts;
    for (std::uint64_t rep = 0; rep < 2000; ++rep) {
        auto rng = make_rng(39, 0, rep);
        const auto pm = gamma_measure(snapshot(1.0, spec, t, rng, {false, false}), tr);
        counts.push_back(static_cast<double>(std::count_if(pm.begin(), pm.end(), [](const Point& p) {
            return p.s <= 0.5 && p.y >= 2.0;
        })));
    }
    CHECK(testing::mc_z(counts, 0.25) < 3.0);
}

TEST_CASE("log Z stays close to Theta") {
    const auto spec = FitnessSpec::weibull(2);
    std::vector<double> q99;
    for (double t : {50.0, 200.0, 800.0}) {
        std::vector<double> dev;
        for (std::uint64_t rep = 0; rep < 50; ++rep) {
            auto rng = make_rng(40, static_cast<std::uint64_t>(t), rep);
            const auto r = snapshot(1.0, spec, t, rng);
            for (const auto& tb : r.tables()) dev.push_back(std::abs(tb.yule.log_size() - tb.weight * (t - tb.tau)));
        }
        q99.push_back(quantile(dev, 0.99));
    }
    CHECK(q99[2] / q99[0] < 800.0 / 50.0);
}
