#pragma once

#include <functional>
#include <span>

namespace dcrp {

struct QuadratureResult {
    double value;
    double error_estimate;
};

/// Adaptive Gauss-Kronrod (15-point) integration of f over [a, b]; b may be +inf.
/// Interior breakpoints (kinks of f) are honored by splitting the range.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints = {});

} // namespace dcrp
