#include "dcrp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dcrp {

namespace {

constexpr unsigned kMaxDepth = 18;
constexpr double kRelTol = 1e-12;

QuadratureResult integrate_piece(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const double v = GK::integrate(f, a, b, kMaxDepth, kRelTol, &err);
    return {v, err};
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints) {
    if (!(b > a)) return {0.0, 0.0};
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(b);

    QuadratureResult total{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        auto piece = integrate_piece(f, cuts[i], cuts[i + 1]);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
    }
    return total;
}

} // namespace dcrp
