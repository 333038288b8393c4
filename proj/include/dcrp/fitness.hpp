#pragma once

#include <string>
#include <string_view>

#include "dcrp/random.hpp"

namespace dcrp {

enum class FitnessKind {
    WeibullPower,       // mu(1-x, 1) = x^alpha
    GumbelBoundedPower, // m(x) = (1-x)^-alpha - 1
    GumbelExpInv,       // m(x) = e^{1/(1-x)} - e
    GumbelRatio,        // m(x) = x/(1-x)
    GumbelExpSqrt,      // m(x) = e^{1/sqrt(1-x)} - e
    GumbelTan,          // m(x) = tan(pi x / 2)
    GumbelLogLog,       // m(x) = log(e/(1-x)) log log(e/(1-x)); Gumbel domain, fails assumption G
    GumbelUnbounded,    // mu(x, inf) = exp(-x^alpha)
    FrechetPareto,      // mu(x, inf) = x^-alpha, x >= 1
    Deterministic,      // point mass at w
};

enum class EvtClass { Weibull, Gumbel, Frechet, None };

const char* to_string(EvtClass c);

/// Immutable catalog entry for the weight distribution mu.
class FitnessSpec {
public:
    /// Parses "kind[:param=value[,param=value]]", e.g. "weibull:alpha=2",
    /// "gumbel-m:c", "gumbel-m:a:alpha=3", "deterministic:w=1".
    static FitnessSpec parse(std::string_view key);

    static FitnessSpec weibull(double alpha);
    static FitnessSpec gumbel_bounded(double alpha);
    static FitnessSpec gumbel_m(FitnessKind kind);
    static FitnessSpec gumbel_unbounded(double alpha);
    static FitnessSpec frechet(double alpha);
    static FitnessSpec deterministic(double w);

    FitnessKind kind() const { return kind_; }
    EvtClass evt_class() const;
    /// Shape parameter alpha; the point-mass location for Deterministic.
    double param() const { return param_; }
    /// Essential supremum: 1 for bounded entries, +inf for unbounded ones.
    double essential_sup() const;
    bool bounded() const;
    /// True for the catalog member known to violate assumption G.
    bool assumption_g_known_false() const { return kind_ == FitnessKind::GumbelLogLog; }
    /// Canonical text key; parse(key()) reproduces the spec.
    std::string key() const;

    bool operator==(const FitnessSpec&) const = default;

private:
    FitnessSpec(FitnessKind kind, double param) : kind_(kind), param_(param) {}

    FitnessKind kind_;
    double param_;
};

/// mu((x, M)). Returns 0 for x >= M.
double tail(const FitnessSpec& spec, double x);

/// mu((M - gap, M)) for bounded entries. Evaluating through the gap keeps full
/// relative precision when the argument is close to the supremum.
double tail_gap(const FitnessSpec& spec, double gap);

/// Inverse transform: the w with mu((w, M)) = u, for u in (0, 1).
double quantile_upper(const FitnessSpec& spec, double u);

inline double sample(const FitnessSpec& spec, Rng& rng) {
    return quantile_upper(spec, uniform_open(rng));
}

struct Normalizers {
    double A;
    double B;
    double A_gap; // M - A for bounded entries, otherwise +inf
};

/// Closed-form centering/scaling with t * mu((A + x B, M)) -> Phi(x).
/// Throws UnsupportedHorizon for t <= 1 on log-based entries and
/// NoNormalizers for Deterministic.
Normalizers normalizers(const FitnessSpec& spec, double t);

/// Limit tail of the extreme value class. +inf is a legitimate value (Frechet, x <= 0).
double phi_limit(const FitnessSpec& spec, double x);

} // namespace dcrp
