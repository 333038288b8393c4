#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dcrp/fitness.hpp"
#include "dcrp/prefix_tree.hpp"
#include "dcrp/random.hpp"

namespace dcrp {

struct StepEvent {
    bool new_table;
    std::size_t table;
    bool leader_changed;
    std::size_t previous_leader;
};

/// Discrete-time disordered Chinese restaurant.
///
/// After n arrivals the sizes sum to n; the first customer sits alone at
/// table 0. Customer n+1 opens a new table with probability proportional to
/// theta and otherwise joins table i with probability proportional to W_i S_i.
/// Tables are indexed from 0 in order of creation; ties for the largest table
/// go to the smaller index.
class Restaurant {
public:
    static constexpr std::uint64_t kRebuildInterval = std::uint64_t{1} << 20;

    Restaurant(double theta, FitnessSpec spec, Rng& rng);
    /// Starts from one customer at a table of the given weight.
    Restaurant(double theta, FitnessSpec spec, double first_weight);

    StepEvent step(Rng& rng);

    double theta() const { return theta_; }
    const FitnessSpec& spec() const { return spec_; }
    std::uint64_t n() const { return n_; }
    std::size_t tables() const { return sizes_.size(); }
    std::uint64_t size(std::size_t i) const { return sizes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    /// Arrival index of the first customer at table i (1-based, table 0 -> 1).
    std::uint64_t birth(std::size_t i) const { return births_[i]; }
    std::size_t leader() const { return leader_; }
    std::uint64_t leader_birth() const { return births_[leader_]; }
    const PrefixTree& tree() const { return tree_; }

    /// Indices of the (up to) k largest tables, by size then by index.
    std::vector<std::size_t> top(std::size_t k) const;

    /// Exact rebuild of the activity tree from W_i S_i.
    void rebuild_tree();

private:
    void open_table(double weight);

    double theta_;
    FitnessSpec spec_;
    std::uint64_t n_ = 0;
    std::vector<std::uint64_t> sizes_;
    std::vector<double> weights_;
    std::vector<std::uint64_t> births_;
    PrefixTree tree_;
    std::size_t leader_ = 0;
    std::uint64_t steps_since_rebuild_ = 0;
};

/// 0-based index of the table containing u within the cumulative activities.
inline std::size_t weighted_pick(const PrefixTree& tree, double u) { return tree.find(u); }

struct DiscreteRecord {
    std::uint64_t n;
    std::size_t tables;
    std::array<std::uint64_t, 3> top_sizes;   // 0 where fewer than 3 tables exist
    std::array<std::int64_t, 3> top_indices;  // -1 where fewer than 3 tables exist
    double share1;
    double share12;
    std::uint64_t leader_birth;
    double leader_weight;
    double table0_share;
};

struct DiscreteConfig {
    double theta;
    FitnessSpec spec;
    std::uint64_t n_max;
    std::vector<std::uint64_t> checkpoints; // sorted; values above n_max are ignored
};

DiscreteRecord snapshot_record(const Restaurant& r);

/// Runs one trajectory and records every checkpoint up to n_max.
std::vector<DiscreteRecord> run_discrete(const DiscreteConfig& cfg, Rng& rng);

} // namespace dcrp
