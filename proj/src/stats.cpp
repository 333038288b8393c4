#include "dcrp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "dcrp/error.hpp"

namespace dcrp {

MeanSe mean_se(std::span<const double> xs) {
    MeanSe r{0.0, 0.0, 0.0, xs.size()};
    if (xs.empty()) {
        r.mean = r.variance = r.se = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    double m2 = 0.0;
    std::size_t k = 0;
    for (double x : xs) {
        ++k;
        const double d = x - r.mean;
        r.mean += d / static_cast<double>(k);
        m2 += d * (x - r.mean);
    }
    r.variance = xs.size() > 1 ? m2 / static_cast<double>(xs.size() - 1) : 0.0;
    r.se = std::sqrt(r.variance / static_cast<double>(xs.size()));
    return r;
}

double variance_se(std::span<const double> xs) {
    const auto ms = mean_se(xs);
    const double n = static_cast<double>(xs.size());
    if (n < 4) return std::numeric_limits<double>::infinity();
    double m4 = 0.0;
    for (double x : xs) m4 += std::pow(x - ms.mean, 4);
    m4 /= n;
    const double s2 = ms.variance;
    return std::sqrt(std::max(0.0, (m4 - s2 * s2 * (n - 3) / (n - 1)) / n));
}

double quantile(std::span<const double> xs, double p) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (v[lo] == v[hi] || frac == 0.0) return v[lo];
    // Interpolating towards an infinite order statistic is undefined; take the nearer one.
    if (!std::isfinite(v[lo]) || !std::isfinite(v[hi])) return frac < 0.5 ? v[lo] : v[hi];
    return v[lo] + frac * (v[hi] - v[lo]);
}

std::vector<double> quantiles(std::span<const double> xs, std::span<const double> ps) {
    std::vector<double> out;
    out.reserve(ps.size());
    for (double p : ps) out.push_back(quantile(xs, p));
    return out;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
    return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == n ? 1.0 : std::min(1.0, centre + half)};
}

double z_score(double observed, double expected, double se) {
    const double diff = observed - expected;
    if (se > 0.0) return diff / se;
    if (diff == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

double ks_statistic(std::span<const double> xs, const std::function<double(double)>& cdf) {
    if (std::any_of(xs.begin(), xs.end(), [](double x) { return std::isnan(x); }))
        throw Error(ErrorKind::Domain, "KS statistic of a sample containing NaN");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_statistic(std::span<const double> xs, std::span<const double> ys) {
    auto has_nan = [](std::span<const double> v) { return std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); }); };
    if (has_nan(xs) || has_nan(ys)) throw Error(ErrorKind::Domain, "KS statistic of a sample containing NaN");
    std::vector<double> a(xs.begin(), xs.end());
    std::vector<double> b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical(double alpha, std::size_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2)) / std::sqrt(static_cast<double>(n));
}

double ks_critical(double alpha, std::size_t n, std::size_t m) {
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return std::sqrt(-0.5 * std::log(alpha / 2)) * std::sqrt((nn + mm) / (nn * mm));
}

double chi_square_statistic(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size()) throw Error(ErrorKind::Domain, "chi-square needs matching bins");
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - expected[i];
        s += d * d / expected[i];
    }
    return s;
}

double chi_square_critical(double alpha, double dof) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

double logsumexp(std::span<const double> xs) {
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    const double mx = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(mx)) return mx;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - mx);
    return mx + std::log(acc);
}

} // namespace dcrp
