#include "dcrp/discrete.hpp"

#include <algorithm>
#include <numeric>

#include "dcrp/error.hpp"

namespace dcrp {

Restaurant::Restaurant(double theta, FitnessSpec spec, Rng& rng)
    : Restaurant(theta, spec, sample(spec, rng)) {}

Restaurant::Restaurant(double theta, FitnessSpec spec, double first_weight) : theta_(theta), spec_(spec) {
    if (!(theta > 0.0)) throw Error(ErrorKind::Domain, "theta must be positive");
    n_ = 1;
    open_table(first_weight);
}

void Restaurant::open_table(double weight) {
    sizes_.push_back(1);
    weights_.push_back(weight);
    births_.push_back(n_);
    tree_.push_back(weight);
}

StepEvent Restaurant::step(Rng& rng) {
    const double u = uniform_open(rng) * (theta_ + tree_.total());
    const std::size_t before = leader_;
    StepEvent ev{};
    ++n_;
    if (u < theta_) {
        open_table(sample(spec_, rng));
        ev.new_table = true;
        ev.table = sizes_.size() - 1;
    } else {
        const std::size_t i = weighted_pick(tree_, u - theta_);
        ++sizes_[i];
        tree_.add(i, weights_[i]);
        ev.new_table = false;
        ev.table = i;
    }
    const std::size_t i = ev.table;
    if (i != leader_ && (sizes_[i] > sizes_[leader_] || (sizes_[i] == sizes_[leader_] && i < leader_)))
        leader_ = i;
    ev.leader_changed = leader_ != before;
    ev.previous_leader = before;

    if (++steps_since_rebuild_ >= kRebuildInterval) rebuild_tree();
    return ev;
}

void Restaurant::rebuild_tree() {
    std::vector<double> activity(sizes_.size());
    for (std::size_t i = 0; i < sizes_.size(); ++i) activity[i] = weights_[i] * static_cast<double>(sizes_[i]);
    tree_ = PrefixTree(activity);
    steps_since_rebuild_ = 0;
}

std::vector<std::size_t> Restaurant::top(std::size_t k) const {
    std::vector<std::size_t> idx(sizes_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    k = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) { return sizes_[a] != sizes_[b] ? sizes_[a] > sizes_[b] : a < b; });
    idx.resize(k);
    return idx;
}

DiscreteRecord snapshot_record(const Restaurant& r) {
    DiscreteRecord rec{};
    rec.n = r.n();
    rec.tables = r.tables();
    rec.top_sizes.fill(0);
    rec.top_indices.fill(-1);
    const auto top = r.top(3);
    for (std::size_t j = 0; j < top.size(); ++j) {
        rec.top_sizes[j] = r.size(top[j]);
        rec.top_indices[j] = static_cast<std::int64_t>(top[j]);
    }
    const double n = static_cast<double>(r.n());
    rec.share1 = static_cast<double>(rec.top_sizes[0]) / n;
    rec.share12 = static_cast<double>(rec.top_sizes[0] + rec.top_sizes[1]) / n;
    rec.leader_birth = r.leader_birth();
    rec.leader_weight = r.weight(r.leader());
    rec.table0_share = static_cast<double>(r.size(0)) / n;
    return rec;
}

std::vector<DiscreteRecord> run_discrete(const DiscreteConfig& cfg, Rng& rng) {
    if (cfg.n_max < 1) throw Error(ErrorKind::Domain, "n_max must be at least 1");
    if (!std::is_sorted(cfg.checkpoints.begin(), cfg.checkpoints.end()))
        throw Error(ErrorKind::Domain, "checkpoints must be sorted");
    Restaurant r(cfg.theta, cfg.spec, rng);
    std::vector<DiscreteRecord> out;
    auto next = cfg.checkpoints.begin();
    const auto end = cfg.checkpoints.end();
    while (next != end && *next < 1) ++next;
    while (true) {
        while (next != end && *next == r.n()) {
            out.push_back(snapshot_record(r));
            ++next;
        }
        if (r.n() >= cfg.n_max || next == end || *next > cfg.n_max) break;
        r.step(rng);
    }
    return out;
}

} // namespace dcrp
