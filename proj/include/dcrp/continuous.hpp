#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dcrp/fitness.hpp"
#include "dcrp/random.hpp"
#include "dcrp/scaling.hpp"
#include "dcrp/yule.hpp"

namespace dcrp {

struct Table {
    double tau;
    double weight;
    YuleState yule; // internal time weight * (t - tau)
};

struct SnapshotOptions {
    /// Adds the initial table (one customer at time 0) in front of the Poisson arrivals.
    bool include_root_table = false;
    /// When false only (tau, W) are drawn; table sizes stay at their initial state
    /// and the restaurant cannot be evolved.
    bool sample_sizes = true;
};

/// Continuous-time embedding: tables open at the jumps of a rate-theta Poisson
/// process and table n holds Y_n(W_n (t - tau_n)) customers for an independent
/// unit-rate Yule process Y_n.
class ContinuousRestaurant {
public:
    ContinuousRestaurant(double theta, FitnessSpec spec, double t, std::vector<Table> tables, bool sizes_sampled)
        : theta_(theta), spec_(spec), t_(t), tables_(std::move(tables)), sizes_sampled_(sizes_sampled) {}

    double theta() const { return theta_; }
    const FitnessSpec& spec() const { return spec_; }
    double t() const { return t_; }
    const std::vector<Table>& tables() const { return tables_; }
    std::size_t table_count() const { return tables_.size(); }
    bool sizes_sampled() const { return sizes_sampled_; }

    /// log N(t) computed without materializing N(t); -inf when empty.
    double log_total_size() const;

    /// Advances to t_next >= t: every table's Yule process is extended by
    /// W (t_next - t) and a fresh Poisson segment of tables is appended.
    void evolve(double t_next, Rng& rng);

private:
    double theta_;
    FitnessSpec spec_;
    double t_;
    std::vector<Table> tables_;
    bool sizes_sampled_;
};

ContinuousRestaurant snapshot(double theta, const FitnessSpec& spec, double t, Rng& rng,
                              SnapshotOptions options = {});

/// Shares of the largest tables, computed in log space so e^{t v_t}-sized
/// tables never overflow. The log1m fields hold log(1 - share).
struct ShareSummary {
    std::size_t tables;
    double log_total;
    std::array<std::int64_t, 3> top_indices; // -1 when missing
    std::array<double, 3> top_log_sizes;
    double share1;
    double share12;
    double log1m_share1;
    double log1m_share12;
};

ShareSummary share_summary(const ContinuousRestaurant& r);

struct ExponentView {
    std::vector<double> theta; // Theta_n = W_n (t - tau_n)
    std::vector<double> xi;    // (Theta_n - t v_t) / (t w_t)
    std::array<double, 3> theta_top;
    std::array<double, 3> xi_top;
    std::array<std::int64_t, 3> argmax; // m_1, m_2, m_3; -1 when missing
    bool too_few_tables;                // fewer than three tables
};

/// Exponents and their top-3 order statistics; ties go to the earlier table.
ExponentView exponent_view(const ContinuousRestaurant& r, const ScalingTriple& triple);

struct Point {
    std::size_t index;
    double tau;
    double weight;
    double s; // tau / u_t
    double y; // (W - v_t) / w_t
    double z; // (log Z - t v_t) / (t w_t)
};

using PointMeasure = std::vector<Point>;

/// Rescaled (creation time, weight, log size) triples of every table.
PointMeasure gamma_measure(const ContinuousRestaurant& r, const ScalingTriple& triple);

} // namespace dcrp
