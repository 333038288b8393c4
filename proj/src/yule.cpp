#include "dcrp/yule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dcrp/error.hpp"

namespace dcrp {

namespace {

// Exact counts expected beyond this are never materialized.
const double kLogCountCeiling = 50.0 * std::numbers::ln2;
constexpr std::uint64_t kGeometricSumLimit = 64;

// Failures before the first success, success probability p = e^{-ds};
// log_q = log(1 - p).
std::uint64_t geometric_failures(double log_q, Rng& rng) {
    if (log_q == -HUGE_VAL) return 0;
    return static_cast<std::uint64_t>(std::floor(std::log(uniform_open(rng)) / log_q));
}

YuleState maybe_promote(std::uint64_t count, double elapsed) {
    if (count > YuleState::kPromotionCount || elapsed > YuleState::kPromotionTime)
        return YuleState::log_mode(static_cast<double>(count) * std::exp(-elapsed), elapsed);
    return YuleState::exact(count, elapsed);
}

} // namespace

double YuleState::log_size() const {
    return is_exact() ? std::log(static_cast<double>(count_)) : elapsed_ + std::log(zeta_hat_);
}

double YuleState::normalized_size() const {
    return is_exact() ? static_cast<double>(count_) * std::exp(-elapsed_) : zeta_hat_;
}

YuleState yule_sample(double s, Rng& rng) {
    if (!(s >= 0.0)) throw Error(ErrorKind::Domain, "yule_sample needs s >= 0");
    if (s > YuleState::kPromotionTime) return YuleState::log_mode(standard_exponential(rng), s);
    if (s == 0.0) return YuleState::exact(1, 0.0);
    const double log_q = std::log(-std::expm1(-s));
    return maybe_promote(1 + geometric_failures(log_q, rng), s);
}

YuleState yule_extend(const YuleState& state, double ds, Rng& rng) {
    if (!(ds >= 0.0)) throw Error(ErrorKind::Domain, "yule_extend needs ds >= 0");
    if (ds == 0.0) return state;
    const double elapsed = state.elapsed() + ds;
    if (!state.is_exact()) return YuleState::log_mode(state.zeta_hat(), elapsed);

    const std::uint64_t k = state.count();
    const double kd = static_cast<double>(k);
    if (std::log(kd) + ds > kLogCountCeiling) {
        // Far past the promotion cap: draw the limit of Y e^{-s} given Y(elapsed) = k,
        // which is e^{-elapsed} Gamma(k, 1).
        std::gamma_distribution<double> gamma(kd, 1.0);
        return YuleState::log_mode(gamma(rng) * std::exp(-state.elapsed()), elapsed);
    }

    std::uint64_t added = 0;
    if (k <= kGeometricSumLimit) {
        const double log_q = std::log(-std::expm1(-ds));
        for (std::uint64_t i = 0; i < k; ++i) added += geometric_failures(log_q, rng);
    } else {
        // NegativeBinomial(k, p) as a Gamma-Poisson mixture with odds (1-p)/p = e^{ds} - 1.
        std::gamma_distribution<double> gamma(kd, std::expm1(ds));
        std::poisson_distribution<std::int64_t> poisson(gamma(rng));
        added = static_cast<std::uint64_t>(poisson(rng));
    }
    return maybe_promote(k + added, elapsed);
}

double yule_tail_bound(double lambda, double a, double b, double y) {
    if (!(lambda > 0.0 && a > 0.0 && b > 0.0 && y > 0.0))
        throw Error(ErrorKind::Domain, "yule_tail_bound needs positive lambda, a, b, y");
    if (a > b) throw Error(ErrorKind::Domain, "yule_tail_bound needs a <= b");
    const double bound = (2.0 + lambda * a) * std::exp(-y * b + lambda * (b - a));
    return std::clamp(bound, 0.0, 1.0);
}

double yule_sup_deviation_frequency(double lambda, double a, double b, double y, std::uint64_t replicas,
                                    int steps, std::uint64_t seed) {
    yule_tail_bound(lambda, a, b, y); // argument validation
    if (replicas == 0 || steps < 1) throw Error(ErrorKind::Domain, "need replicas > 0 and steps >= 1");
    const double threshold = y * b;
    const double h = (b - a) / steps;
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
        Rng rng = make_rng(seed, 0x59u, r);
        auto state = yule_sample(lambda * a, rng);
        bool hit = std::abs(state.log_size() - lambda * a) >= threshold;
        for (int i = 1; i <= steps && !hit; ++i) {
            state = yule_extend(state, lambda * h, rng);
            hit = std::abs(state.log_size() - lambda * (a + i * h)) >= threshold;
        }
        hits += hit;
    }
    return static_cast<double>(hits) / static_cast<double>(replicas);
}

} // namespace dcrp
