#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dcrp/stats.hpp"

namespace testing {

// |mean - expected| in units of the sample standard error.
inline double mc_z(const std::vector<double>& xs, double expected) {
    const auto ms = dcrp::mean_se(xs);
    return std::abs(ms.mean - expected) / ms.se;
}

// Same, with the standard error supplied from a known variance.
inline double mc_z_known(const std::vector<double>& xs, double expected, double variance) {
    const auto ms = dcrp::mean_se(xs);
    return std::abs(ms.mean - expected) / std::sqrt(variance / static_cast<double>(xs.size()));
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

} // namespace testing
