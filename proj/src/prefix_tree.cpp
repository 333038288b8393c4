#include "dcrp/prefix_tree.hpp"

#include <algorithm>
#include <bit>

namespace dcrp {

PrefixTree::PrefixTree(std::span<const double> values) : values_(values.begin(), values.end()) {
    capacity_ = std::bit_ceil(std::max<std::size_t>(values_.size(), 1));
    rebuild();
}

void PrefixTree::rebuild() {
    tree_.assign(capacity_ + 1, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) tree_[i + 1] = values_[i];
    for (std::size_t i = 1; i <= capacity_; ++i) {
        const std::size_t parent = i + (i & (~i + 1));
        if (parent <= capacity_) tree_[parent] += tree_[i];
    }
    total_ = 0.0;
    for (double v : values_) total_ += v;
}

void PrefixTree::grow() {
    capacity_ = std::max<std::size_t>(1, capacity_ * 2);
    rebuild();
}

void PrefixTree::push_back(double value) {
    values_.push_back(0.0);
    if (values_.size() > capacity_) grow();
    add(values_.size() - 1, value);
}

void PrefixTree::add(std::size_t i, double delta) {
    values_[i] += delta;
    total_ += delta;
    for (std::size_t j = i + 1; j <= capacity_; j += j & (~j + 1)) tree_[j] += delta;
}

double PrefixTree::prefix(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = i; j > 0; j -= j & (~j + 1)) s += tree_[j];
    return s;
}

std::size_t PrefixTree::find(double u) const {
    std::size_t pos = 0;
    for (std::size_t step = capacity_; step > 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next <= capacity_ && tree_[next] <= u) {
            pos = next;
            u -= tree_[next];
        }
    }
    // Rounding can push u past the last positive slot; step back onto it.
    std::size_t last = values_.size();
    while (last > 0 && values_[last - 1] <= 0.0) --last;
    if (last == 0) return 0;
    pos = std::min(pos, last - 1);
    while (pos > 0 && values_[pos] <= 0.0) --pos;
    return pos;
}

} // namespace dcrp
