#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcrp {

/// Binary-indexed tree over non-negative activities with O(log K) update and
/// weighted lookup. Capacity doubles on push_back; the raw values are kept so
/// the tree can be rebuilt exactly.
class PrefixTree {
public:
    PrefixTree() = default;
    explicit PrefixTree(std::span<const double> values);

    std::size_t size() const { return values_.size(); }
    double value(std::size_t i) const { return values_[i]; }
    double total() const { return total_; }

    void push_back(double value);
    void add(std::size_t i, double delta);
    /// Sum of values[0..i).
    double prefix(std::size_t i) const;

    /// The unique i with prefix(i) <= u < prefix(i + 1), for u in [0, total()).
    /// Values of u at or beyond the floating-point total map to the last
    /// non-empty slot.
    std::size_t find(double u) const;

    /// Recomputes every node (and the total) from the stored values.
    void rebuild();

    /// Node array, exposed for consistency checks.
    const std::vector<double>& nodes() const { return tree_; }

private:
    void grow();

    std::vector<double> values_;
    std::vector<double> tree_; // 1-based Fenwick layout, tree_[0] unused
    std::size_t capacity_ = 0;
    double total_ = 0.0;
};

} // namespace dcrp
