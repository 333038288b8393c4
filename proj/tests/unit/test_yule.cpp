#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "dcrp/error.hpp"
#include "dcrp/stats.hpp"
#include "dcrp/yule.hpp"

using namespace dcrp;

TEST_CASE("s = 0 gives one individual") {
    auto rng = make_rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto y = yule_sample(0.0, rng);
        CHECK(y.is_exact());
        CHECK(y.count() == 1);
    }
}

TEST_CASE("geometric mean at s = 3") {
    auto rng = make_rng(2);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = static_cast<double>(yule_sample(3.0, rng).count());
    const double e3 = std::exp(3.0);
    CHECK(testing::mc_z_known(xs, e3, std::exp(6.0) - e3) < 3.0);
}

TEST_CASE("log mode beyond the promotion time") {
    auto rng = make_rng(3);
    std::vector<double> xs(100000);
    for (auto& x : xs) {
        const auto y = yule_sample(100.0, rng);
        REQUIRE_FALSE(y.is_exact());
        REQUIRE(y.zeta_hat() > 0.0);
        x = y.log_size() - 100.0;
    }
    // log Exp(1): mean -gamma, variance pi^2 / 6
    CHECK(testing::mc_z_known(xs, -std::numbers::egamma, std::numbers::pi * std::numbers::pi / 6) < 3.0);
}

TEST_CASE("extend by zero is the identity") {
    auto rng = make_rng(4);
    const auto a = YuleState::exact(7, 1.5);
    const auto b = yule_extend(a, 0.0, rng);
    CHECK(b.is_exact());
    CHECK(b.count() == 7);
    CHECK(b.elapsed() == 1.5);
    const auto c = YuleState::log_mode(0.3, 40.0);
    const auto d = yule_extend(c, 0.0, rng);
    CHECK(d.zeta_hat() == 0.3);
    CHECK(d.elapsed() == 40.0);
}

TEST_CASE("extending one individual by s matches a direct draw (two-sample KS at 1%)") {
    constexpr std::size_t n = 100000;
    auto r1 = make_rng(5, 1);
    auto r2 = make_rng(5, 2);
    std::vector<double> direct(n), extended(n);
    for (std::size_t i = 0; i < n; ++i) {
        direct[i] = static_cast<double>(yule_sample(2.0, r1).count());
        extended[i] = static_cast<double>(yule_extend(YuleState::exact(1, 0.0), 2.0, r2).count());
    }
    CHECK(ks_statistic(direct, extended) < ks_critical(0.01, n, n));

    // Two half-steps as well.
    for (std::size_t i = 0; i < n; ++i)
        extended[i] = static_cast<double>(yule_extend(yule_extend(YuleState::exact(1, 0.0), 0.7, r2), 1.3, r2).count());
    CHECK(ks_statistic(direct, extended) < ks_critical(0.01, n, n));
}

TEST_CASE("five individuals for one unit of time") {
    auto rng = make_rng(6);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = static_cast<double>(yule_extend(YuleState::exact(5, 0.0), 1.0, rng).count());
    const double e = std::numbers::e;
    CHECK(testing::mc_z_known(xs, 5 * e, 5 * (e * e - e)) < 3.0);
}

TEST_CASE("large increments use the gamma-poisson branch without bias") {
    auto rng = make_rng(7);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = static_cast<double>(yule_extend(YuleState::exact(1000, 0.0), 2.0, rng).count());
    const double e2 = std::exp(2.0);
    CHECK(testing::mc_z_known(xs, 1000 * e2, 1000 * (e2 * e2 - e2)) < 3.0);
}

TEST_CASE("martingale: E[Y(s) e^-s] = 1 across extensions") {
    auto rng = make_rng(8);
    for (double s : {0.5, 2.0, 5.0, 12.0}) {
        std::vector<double> xs(40000);
        for (auto& x : xs) {
            auto y = yule_sample(s / 3, rng);
            y = yule_extend(y, s / 3, rng);
            y = yule_extend(y, s / 3, rng);
            CHECK(y.elapsed() == doctest::Approx(s).epsilon(1e-12));
            x = y.normalized_size();
        }
        CAPTURE(s);
        CHECK(testing::mc_z(xs, 1.0) < 3.0);
    }
}

TEST_CASE("paths never shrink and promote on time") {
    auto rng = make_rng(9);
    for (int rep = 0; rep < 200; ++rep) {
        auto y = YuleState::exact(1, 0.0);
        double prev = y.log_size();
        for (int i = 0; i < 70; ++i) {
            y = yule_extend(y, 0.5, rng);
            CHECK(y.log_size() >= prev);
            prev = y.log_size();
        }
        CHECK_FALSE(y.is_exact());
        CHECK(y.log_size() == doctest::Approx(35.0 + std::log(y.zeta_hat())).epsilon(1e-12));
    }
}

TEST_CASE("exact and log mode agree across the seam (two-sample KS at 1%)") {
    constexpr std::size_t n = 50000;
    const double below = YuleState::kPromotionTime - 0.01;
    const double above = YuleState::kPromotionTime + 0.01;
    auto rng = make_rng(10);
    std::vector<double> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = yule_sample(below, rng);
        REQUIRE(a.is_exact());
        lo[i] = a.log_size() - below;
        const auto b = yule_sample(above, rng);
        REQUIRE_FALSE(b.is_exact());
        hi[i] = b.log_size() - above;
    }
    CHECK(ks_statistic(lo, hi) < ks_critical(0.01, n, n));
}

TEST_CASE("tail bound arithmetic") {
    CHECK(yule_tail_bound(1, 10, 10, 1) == doctest::Approx(12 * std::exp(-10.0)).epsilon(1e-14));
    CHECK(yule_tail_bound(1, 10, 10, 1) == doctest::Approx(5.45e-4).epsilon(1e-3));
    CHECK(yule_tail_bound(1, 9, 10, 0.5) == doctest::Approx(11 * std::exp(-4.0)).epsilon(1e-14));
    CHECK(yule_tail_bound(1, 9, 10, 0.5) == doctest::Approx(0.2014).epsilon(1e-3));
    CHECK(yule_tail_bound(1, 1, 2, 1e3) == 0.0);
    CHECK(yule_tail_bound(1, 1, 2, 0.01) == 1.0);
    try {
        yule_tail_bound(1, 3, 2, 1);
        FAIL("a > b accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
    }
}

TEST_CASE("sup deviation frequency stays under the bound") {
    struct P {
        double lambda, a, b, y;
    };
    // Second and third rows are small enough for the bound to be informative.
    for (P p : {P{1, 1, 2, 2}, P{1, 3, 3.5, 0.6}, P{2, 0.5, 1, 1.2}, P{0.5, 2, 4, 1}}) {
        const std::uint64_t reps = 4000;
        const double f = yule_sup_deviation_frequency(p.lambda, p.a, p.b, p.y, reps, 200, 11);
        const double bound = yule_tail_bound(p.lambda, p.a, p.b, p.y);
        const double se = std::sqrt(std::max(bound * (1 - bound), 1e-12) / reps);
        CAPTURE(p.lambda);
        CAPTURE(p.a);
        CHECK(f <= bound + 3 * se);
    }
}
