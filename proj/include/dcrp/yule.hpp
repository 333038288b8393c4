#pragma once

#include <cstdint>

#include "dcrp/random.hpp"

namespace dcrp {

/// Unit-rate Yule process state after internal time `elapsed`.
///
/// Small processes are tracked exactly. Once the count passes kPromotionCount or
/// elapsed passes kPromotionTime the state switches to log mode: Y(s) e^{-s} has
/// converged to its exponential limit zeta within Monte Carlo resolution, so only
/// zeta_hat is kept and log Y(s) = s + log zeta_hat from then on.
class YuleState {
public:
    static constexpr std::uint64_t kPromotionCount = std::uint64_t{1} << 48;
    static constexpr double kPromotionTime = 30.0;

    static YuleState exact(std::uint64_t count, double elapsed) { return {Mode::Exact, count, 0.0, elapsed}; }
    static YuleState log_mode(double zeta_hat, double elapsed) { return {Mode::Log, 0, zeta_hat, elapsed}; }

    bool is_exact() const { return mode_ == Mode::Exact; }
    std::uint64_t count() const { return count_; }
    double zeta_hat() const { return zeta_hat_; }
    double elapsed() const { return elapsed_; }

    double log_size() const;
    /// Y(s) e^{-s}; a martingale with mean 1.
    double normalized_size() const;

private:
    enum class Mode { Exact, Log };
    YuleState(Mode m, std::uint64_t count, double zeta, double elapsed)
        : mode_(m), count_(count), zeta_hat_(zeta), elapsed_(elapsed) {}

    Mode mode_;
    std::uint64_t count_;
    double zeta_hat_;
    double elapsed_;
};

/// Y(s) for a process started from one individual: geometric on {1, 2, ...}
/// with success probability e^{-s}, or log mode beyond the promotion time.
YuleState yule_sample(double s, Rng& rng);

/// Advances by ds using the branching property: k individuals become
/// k + NegativeBinomial(k, e^{-ds}). Log-mode states advance deterministically.
YuleState yule_extend(const YuleState& state, double ds, Rng& rng);

/// (2 + lambda a) exp(-y b + lambda (b - a)), clamped to [0, 1]: a bound on
/// P(sup_{t in [a,b]} |log Y_t - lambda t| >= y b) for a rate-lambda Yule process.
/// Throws DomainError unless 0 < a <= b and lambda, y > 0.
double yule_tail_bound(double lambda, double a, double b, double y);

/// Fraction of replicas whose path satisfies sup_{t in [a,b]} |log Y_t - lambda t| >= y b,
/// with the supremum taken over `steps` equal sub-intervals of [a, b].
double yule_sup_deviation_frequency(double lambda, double a, double b, double y, std::uint64_t replicas,
                                    int steps, std::uint64_t seed);

} // namespace dcrp
