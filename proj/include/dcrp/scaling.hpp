#pragma once

#include <span>
#include <vector>

#include "dcrp/fitness.hpp"

namespace dcrp {

/// (u_t, v_t, w_t) at horizon t: creation-time scale of the leading tables and
/// the centre/spread of their weights.
struct ScalingTriple {
    double t;
    double u;
    double v;
    double w;
    double v_gap; // M - v for bounded entries, +inf otherwise
};

/// Frechet: (t, 0, B(t)). Weibull/Gumbel: u solves u A(u) / B(u) = t, found by
/// bisection on log u over [2, t^2]; v = A(u), w = B(u).
/// Throws NoSolution when t is below f(2), the admissible minimum of the entry.
ScalingTriple solve_scaling(const FitnessSpec& spec, double t);

/// |t B(u) - u A(u)| / (t B(u)); zero for the Frechet branch where u = t by definition.
double scaling_residual(const FitnessSpec& spec, const ScalingTriple& triple);

/// Phi_t(x) = u mu((v + x w, M)); zero once v + x w >= M.
double phi_t(const FitnessSpec& spec, const ScalingTriple& triple, double x);

/// L_1(t) log log t with L_1 = u/t; only meaningful as a trend in t.
double slow_variation_diagnostic(const ScalingTriple& triple);

struct AssumptionGRow {
    double x;
    double phi_t;
    double lower;
    double upper;
    bool lower_applies;
    bool upper_applies;
    double lower_margin; // log phi_t - log lower; >= 0 when the lower bound holds
    double upper_margin; // log upper - log phi_t; >= 0 when the upper bound holds
    bool pass;
};

struct AssumptionGReport {
    double t;
    double c1;
    double c2;
    ScalingTriple triple;
    std::vector<AssumptionGRow> rows;
    double worst_lower_margin;
    double worst_upper_margin;
    bool lower_ok;
    bool upper_ok;
};

struct AssumptionGConstants {
    double c1;
    double c2;
};

/// Default (c1, c2): (C / alpha^2, 1) for the bounded power entry, where C bounds
/// ((1-y)^-alpha - 1 - alpha y) / y^2 on [-1, 1/2]; (1, 1) for other Gumbel entries.
AssumptionGConstants default_assumption_g_constants(const FitnessSpec& spec);

/// Audits both sides of the quadratic-correction envelope around e^{-x}.
/// x = 0 rows are reported but never fail. Throws WrongClass off the Gumbel class.
AssumptionGReport check_assumption_g(const FitnessSpec& spec, double t, double c1, double c2,
                                     std::span<const double> grid);

struct L1Row {
    double t;
    double lhs;
    double rhs;
    double error;
};

struct L1Report {
    double x;
    std::vector<L1Row> rows;
    bool monotone; // |lhs - rhs| non-increasing along the grid
};

/// int_x^inf t mu((A(t) + u B(t), M)) du against int_x^inf Phi(u) du.
/// Requires x >= 0; throws WrongClass for Frechet and Deterministic entries.
L1Report check_l1_convergence(const FitnessSpec& spec, double x, std::span<const double> t_grid);

} // namespace dcrp
