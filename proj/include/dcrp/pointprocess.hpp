#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dcrp/continuous.hpp"
#include "dcrp/fitness.hpp"
#include "dcrp/scaling.hpp"
#include "dcrp/stats.hpp"

namespace dcrp {

/// pi(A_t(x)) for the intensity theta ds (x) mu of the (tau, W) process, where
/// A_t(x) = {(s, w) in [0, t] x [0, M) : w (t - s) > t v_t + x t w_t} is the event xi_n > x.
/// Throws DomainError when x <= -v_t / w_t.
double pi_At(double theta, const FitnessSpec& spec, const ScalingTriple& triple, double x);

/// eps theta (t w_t / u_t) Phi_t(x) / (v_t + x w_t), an upper bound on
/// pi(A_t(x)) - pi(A_t(x + eps)).
double pi_At_difference_bound(double theta, const FitnessSpec& spec, const ScalingTriple& triple, double x,
                              double eps);

/// [0, a] x [b, inf) in (s, y), optionally intersected with z >= c.
struct BoxSpec {
    double a;
    double b;
    std::optional<double> c;
};

struct BoxPrediction {
    double mean_finite; // exact at horizon t for the (s, y) box; exponent-based when c is set
    double mean_limit;
    double void_finite;
    double void_limit;
};

/// Expected count and void probability of the box, at finite t and in the limit.
BoxPrediction box_prediction(double theta, const FitnessSpec& spec, const ScalingTriple& triple, const BoxSpec& box);

struct VoidProbability {
    double finite;
    double limit;
};

VoidProbability void_probability(double theta, const FitnessSpec& spec, const ScalingTriple& triple,
                                 const BoxSpec& box);

std::uint64_t count_in_box(const PointMeasure& pm, const BoxSpec& box);

struct BoxComparison {
    std::uint64_t replicas;
    double empirical_mean;
    double se;
    double z;        // against mean_limit
    double z_finite; // against mean_finite
    double empirical_void;
    Interval void_interval; // Wilson, 95%
    double void_se;         // binomial SE under the limit prediction
    double z_void;
    double z_void_finite;
};

/// Requires at least 100 replicas.
BoxComparison empirical_compare(std::span<const std::uint64_t> counts, const BoxPrediction& prediction);
BoxComparison empirical_compare(std::span<const PointMeasure> samples, const BoxSpec& box,
                                const BoxPrediction& prediction);

/// xi^(1)(t) for independent snapshots; -inf for an empty restaurant. Only (tau, W) are drawn.
std::vector<double> sample_top_exponent(double theta, const FitnessSpec& spec, double t, std::uint64_t replicas,
                                        std::uint64_t seed, unsigned threads = 1);

struct VoidIdentityRow {
    double x;
    double predicted; // exp(-pi(A_t(x)))
    double empirical;
    double se;
    double z;
};

/// P(xi^(1)(t) <= x) against exp(-pi(A_t(x))), which holds exactly at every t.
std::vector<VoidIdentityRow> void_identity_compare(double theta, const FitnessSpec& spec, double t,
                                                   std::span<const double> xs, std::uint64_t replicas,
                                                   std::uint64_t seed, unsigned threads = 1);

struct GapRow {
    double lambda;
    std::uint64_t hits; // replicas with xi^(1) - xi^(3) <= lambda
    std::uint64_t used;
    double frequency;
    Interval wilson;
    double ratio; // frequency / lambda^2
};

struct GapReport {
    double t;
    std::uint64_t replicas;
    std::uint64_t too_few; // replicas with fewer than three tables
    std::vector<GapRow> rows;
};

/// Empirical P(xi^(1) - xi^(3) <= lambda) over snapshots at t.
/// Throws TooFewTables when more than 10% of replicas hold fewer than three tables.
GapReport gap_probabilities(double theta, const FitnessSpec& spec, double t, std::span<const double> lambdas,
                            std::uint64_t replicas, std::uint64_t seed, unsigned threads = 1);

} // namespace dcrp
