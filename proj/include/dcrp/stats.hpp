#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dcrp {

struct MeanSe {
    double mean;
    double variance; // unbiased
    double se;       // sqrt(variance / n)
    std::size_t n;
};

MeanSe mean_se(std::span<const double> xs);

/// Standard error of the unbiased sample variance, from the fourth central moment.
double variance_se(std::span<const double> xs);

/// Linear-interpolation quantile (R type 7). Sorts a copy; next to an infinite
/// order statistic the nearer of the two is returned.
double quantile(std::span<const double> xs, double p);
std::vector<double> quantiles(std::span<const double> xs, std::span<const double> ps);

struct Interval {
    double lo;
    double hi;
};

/// Wilson score interval for `successes` out of `n` at normal quantile z.
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963984540054);

/// (observed - expected) / se with the 0/0 case mapped to 0 and x/0 to +-inf.
double z_score(double observed, double expected, double se);

/// sup |F_n - F| for the empirical CDF of xs against a continuous CDF. NaN samples are a DomainError.
double ks_statistic(std::span<const double> xs, const std::function<double(double)>& cdf);
double ks_statistic(std::span<const double> xs, std::span<const double> ys);

/// Asymptotic Kolmogorov critical value c(alpha) = sqrt(-log(alpha / 2) / 2),
/// scaled to one- or two-sample statistics.
double ks_critical(double alpha, std::size_t n);
double ks_critical(double alpha, std::size_t n, std::size_t m);

/// Pearson statistic sum (O - E)^2 / E and the upper alpha quantile of chi^2(dof).
double chi_square_statistic(std::span<const double> observed, std::span<const double> expected);
double chi_square_critical(double alpha, double dof);

/// log sum exp(xs); -inf for an empty range.
double logsumexp(std::span<const double> xs);

} // namespace dcrp
