#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "dcrp/discrete.hpp"
#include "dcrp/stats.hpp"

using namespace dcrp;

TEST_CASE("weighted pick on prefix sums") {
    PrefixTree one(std::vector<double>{2.5});
    for (double u : {0.0, 1.0, 2.4999}) CHECK(weighted_pick(one, u) == 0);

    PrefixTree two(std::vector<double>{1, 3});
    CHECK(weighted_pick(two, 2.0) == 1);
    CHECK(weighted_pick(two, 0.99) == 0);
    CHECK(weighted_pick(two, 1.0) == 1);

    PrefixTree three(std::vector<double>{2, 2, 2});
    CHECK(weighted_pick(three, 3.0) == 1);
    CHECK(weighted_pick(three, 4.0) == 2);
    CHECK(weighted_pick(three, 6.0) == 2); // rounding past the total
}

TEST_CASE("prefix tree agrees with a linear scan") {
    auto rng = make_rng(21);
    PrefixTree tree;
    std::vector<double> v;
    for (int i = 0; i < 3000; ++i) {
        if (v.empty() || uniform_open(rng) < 0.3) {
            v.push_back(uniform_open(rng) * 5);
            tree.push_back(v.back());
        } else {
            const auto j = static_cast<std::size_t>(uniform_open(rng) * v.size());
            const double d = uniform_open(rng);
            v[j] += d;
            tree.add(j, d);
        }
        if (i % 97 == 0) {
            const double total = std::accumulate(v.begin(), v.end(), 0.0);
            CHECK(tree.total() == doctest::Approx(total).epsilon(1e-12));
            const double u = uniform_open(rng) * total;
            double acc = 0.0;
            std::size_t want = 0;
            while (acc + v[want] <= u) acc += v[want++];
            CHECK(tree.find(u) == want);
            const auto k = static_cast<std::size_t>(uniform_open(rng) * (v.size() + 1));
            CHECK(tree.prefix(k) == doctest::Approx(std::accumulate(v.begin(), v.begin() + k, 0.0)).epsilon(1e-12));
        }
    }
    const auto before = tree.nodes();
    tree.rebuild();
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(tree.nodes()[i] == doctest::Approx(before[i]).epsilon(1e-9));
}

TEST_CASE("first step opens a table with probability theta / (theta + w)") {
    const double theta = 1.5, w = 0.7;
    constexpr int n = 100000;
    auto rng = make_rng(22);
    double opened = 0;
    for (int i = 0; i < n; ++i) {
        Restaurant r(theta, FitnessSpec::weibull(2), w);
        opened += r.step(rng).new_table;
    }
    const double p = theta / (theta + w);
    const std::vector<double> obs{opened, n - opened};
    const std::vector<double> exp{n * p, n * (1 - p)};
    CHECK(chi_square_statistic(obs, exp) < chi_square_critical(0.01, 1));
}

TEST_CASE("vanishing theta almost never opens tables") {
    auto rng = make_rng(23);
    Restaurant r(1e-9, FitnessSpec::weibull(2), 1.0);
    int joins = 0;
    for (int i = 0; i < 100000; ++i) joins += !r.step(rng).new_table;
    CHECK(joins >= 100000 * (1 - 1e-6));
}

TEST_CASE("classical two-step law") {
    constexpr int n = 100000;
    auto rng = make_rng(24);
    double two_tables = 0;
    for (int i = 0; i < n; ++i) {
        Restaurant r(1.0, FitnessSpec::deterministic(1), rng);
        r.step(rng);
        two_tables += r.tables() == 2;
        CHECK((r.tables() == 2) == (r.size(0) == 1));
    }
    const std::vector<double> obs{two_tables, n - two_tables};
    const std::vector<double> exp{n / 2.0, n / 2.0};
    CHECK(chi_square_statistic(obs, exp) < chi_square_critical(0.01, 1));
}

TEST_CASE("occupancy and tree stay consistent") {
    auto rng = make_rng(25);
    Restaurant r(2.0, FitnessSpec::frechet(1.5), rng);
    CHECK(r.n() == 1);
    CHECK(r.tables() == 1);
    CHECK(r.birth(0) == 1);
    for (int i = 0; i < 20000; ++i) {
        const auto ev = r.step(rng);
        if (ev.leader_changed) CHECK(ev.previous_leader != r.leader());
        if (i % 1000 == 0) {
            std::uint64_t sum = 0;
            double act = 0.0;
            for (std::size_t k = 0; k < r.tables(); ++k) {
                CHECK(r.size(k) > 0);
                sum += r.size(k);
                act += r.weight(k) * r.size(k);
            }
            CHECK(sum == r.n());
            CHECK(r.tree().total() == doctest::Approx(act).epsilon(1e-9));
            for (std::size_t k = 0; k < r.tables(); ++k) CHECK(r.size(r.leader()) >= r.size(k));
        }
    }
    const auto incremental = r.tree().nodes();
    r.rebuild_tree();
    for (std::size_t i = 0; i < incremental.size(); ++i)
        CHECK(r.tree().nodes()[i] == doctest::Approx(incremental[i]).epsilon(1e-9));
}

TEST_CASE("ties for the largest table go to the smaller index") {
    Restaurant r(1.0, FitnessSpec::deterministic(1), 1.0);
    auto rng = make_rng(26);
    while (r.tables() < 2) r.step(rng);
    // Grow until table 1 catches table 0 exactly.
    for (int i = 0; i < 100000 && !(r.tables() >= 2 && r.size(0) == r.size(1)); ++i) r.step(rng);
    if (r.size(0) == r.size(1)) {
        CHECK(r.top(2)[0] == 0);
        CHECK(r.top(2)[1] == 1);
    }
}

TEST_CASE("run_discrete records") {
    auto rng = make_rng(27);
    DiscreteConfig cfg{1.0, FitnessSpec::weibull(2), 1000, {1, 10, 100, 1000, 5000}};
    const auto recs = run_discrete(cfg, rng);
    REQUIRE(recs.size() == 4);
    CHECK(recs[0].n == 1);
    CHECK(recs[0].tables == 1);
    CHECK(recs[0].share1 == 1.0);
    CHECK(recs[0].top_indices[1] == -1);
    CHECK(recs[0].top_sizes[1] == 0);
    for (const auto& rec : recs) {
        CHECK(rec.share1 >= 0.0);
        CHECK(rec.share1 <= rec.share12);
        CHECK(rec.share12 <= 1.0);
        CHECK(rec.table0_share <= rec.share1);
        CHECK(rec.top_sizes[0] >= rec.top_sizes[1]);
        CHECK(rec.leader_birth >= 1);
        CHECK(rec.leader_birth <= rec.n);
    }
}

TEST_CASE("classical reduction: mean and variance of K_n") {
    // Exact sums for the Pitman CRP.
    const double theta = 1.0;
    constexpr int n = 200;
    double mean = 1.0, var = 0.0;
    for (int m = 1; m < n; ++m) {
        mean += theta / (theta + m);
        var += theta * m / ((theta + m) * (theta + m));
    }
    std::vector<double> ks;
    for (std::uint64_t rep = 0; rep < 4000; ++rep) {
        auto rng = make_rng(28, 0, rep);
        DiscreteConfig cfg{theta, FitnessSpec::deterministic(1), n, {n}};
        ks.push_back(static_cast<double>(run_discrete(cfg, rng).back().tables));
    }
    const auto ms = mean_se(ks);
    CHECK(std::abs(ms.mean - mean) < 3 * ms.se);
    CHECK(std::abs(ms.variance - var) < 3 * variance_se(ks));
}

TEST_CASE("identical seeds give identical paths") {
    auto a = make_rng(29, 3, 7);
    auto b = make_rng(29, 3, 7);
    DiscreteConfig cfg{1.0, FitnessSpec::gumbel_unbounded(2), 3000, {100, 3000}};
    const auto ra = run_discrete(cfg, a);
    const auto rb = run_discrete(cfg, b);
    CHECK(ra.back().tables == rb.back().tables);
    CHECK(ra.back().top_sizes == rb.back().top_sizes);
    CHECK(ra.back().leader_weight == rb.back().leader_weight);
}
