#include "dcrp/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dcrp/error.hpp"
#include "dcrp/quadrature.hpp"

namespace dcrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinU = 2.0;
constexpr int kMaxBisections = 200;
constexpr double kRelTol = 1e-12;

double cond_u_ratio(const FitnessSpec& spec, double u) {
    const auto n = normalizers(spec, u);
    return u * n.A / n.B;
}

void require_gumbel(const FitnessSpec& spec) {
    if (spec.evt_class() != EvtClass::Gumbel)
        throw Error(ErrorKind::WrongClass, "assumption G applies to the Gumbel class only, got " + spec.key());
}

} // namespace

ScalingTriple solve_scaling(const FitnessSpec& spec, double t) {
    switch (spec.evt_class()) {
    case EvtClass::None:
        throw Error(ErrorKind::NoNormalizers, "deterministic weights have no scaling triple");
    case EvtClass::Frechet: {
        const auto n = normalizers(spec, t);
        return {t, t, 0.0, n.B, kInf};
    }
    default: break;
    }

    const double f_min = cond_u_ratio(spec, kMinU);
    if (!(t >= f_min))
        throw Error(ErrorKind::NoSolution, "t=" + std::to_string(t) + " below admissible minimum " +
                                               std::to_string(f_min) + " for " + spec.key());
    double lo = std::log(kMinU);
    double hi = 2.0 * std::log(t);
    if (cond_u_ratio(spec, std::exp(hi)) < t)
        throw Error(ErrorKind::NoSolution, "no root of u A(u)/B(u) = t within [2, t^2]");

    // f is continuous and increasing, so bisection on log u always converges.
    for (int i = 0; i < kMaxBisections && std::expm1(hi - lo) > 0.1 * kRelTol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cond_u_ratio(spec, std::exp(mid)) < t)
            lo = mid;
        else
            hi = mid;
    }
    const double u = std::exp(0.5 * (lo + hi));
    const auto n = normalizers(spec, u);
    return {t, u, n.A, n.B, n.A_gap};
}

double scaling_residual(const FitnessSpec& spec, const ScalingTriple& tr) {
    if (spec.evt_class() == EvtClass::Frechet) return 0.0;
    const double lhs = tr.t * tr.w;
    return std::abs(lhs - tr.u * tr.v) / lhs;
}

double phi_t(const FitnessSpec& spec, const ScalingTriple& tr, double x) {
    if (spec.bounded()) {
        const double gap = tr.v_gap - x * tr.w;
        return gap <= 0.0 ? 0.0 : tr.u * tail_gap(spec, gap);
    }
    return tr.u * tail(spec, tr.v + x * tr.w);
}

double slow_variation_diagnostic(const ScalingTriple& tr) {
    return tr.u / tr.t * std::log(std::log(tr.t));
}

AssumptionGConstants default_assumption_g_constants(const FitnessSpec& spec) {
    require_gumbel(spec);
    if (spec.kind() != FitnessKind::GumbelBoundedPower) return {1.0, 1.0};
    const double alpha = spec.param();
    double c = 0.0;
    constexpr int kSteps = 15000;
    for (int i = 0; i <= kSteps; ++i) {
        const double y = -1.0 + 1.5 * i / kSteps;
        if (std::abs(y) < 1e-6) continue;
        c = std::max(c, (std::pow(1.0 - y, -alpha) - 1.0 - alpha * y) / (y * y));
    }
    return {c / (alpha * alpha), 1.0};
}

AssumptionGReport check_assumption_g(const FitnessSpec& spec, double t, double c1, double c2,
                                     std::span<const double> grid) {
    require_gumbel(spec);
    AssumptionGReport rep{t, c1, c2, solve_scaling(spec, t), {}, kInf, kInf, true, true};
    const double lt = std::log(t);
    const double x_max = spec.bounded() ? rep.triple.v_gap / rep.triple.w : kInf;

    for (double x : grid) {
        AssumptionGRow row{};
        row.x = x;
        row.phi_t = phi_t(spec, rep.triple, x);
        row.lower = std::exp(-x - c1 * x * x / lt);
        row.upper = std::exp(-x + c1 * x * x / lt);
        row.lower_applies = x > -c2 * lt && x < c2 * lt;
        row.upper_applies = x > -c2 * lt && x < x_max;
        const double log_phi = std::log(row.phi_t);
        row.lower_margin = log_phi - (-x - c1 * x * x / lt);
        row.upper_margin = (-x + c1 * x * x / lt) - log_phi;
        const bool lower_ok = !row.lower_applies || row.lower_margin >= 0.0;
        const bool upper_ok = !row.upper_applies || row.upper_margin >= 0.0;
        row.pass = x == 0.0 || (lower_ok && upper_ok);
        if (x != 0.0) {
            if (row.lower_applies) rep.worst_lower_margin = std::min(rep.worst_lower_margin, row.lower_margin);
            if (row.upper_applies) rep.worst_upper_margin = std::min(rep.worst_upper_margin, row.upper_margin);
            rep.lower_ok = rep.lower_ok && lower_ok;
            rep.upper_ok = rep.upper_ok && upper_ok;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

L1Report check_l1_convergence(const FitnessSpec& spec, double x, std::span<const double> t_grid) {
    const auto cls = spec.evt_class();
    if (cls != EvtClass::Weibull && cls != EvtClass::Gumbel)
        throw Error(ErrorKind::WrongClass, "L1 convergence is checked for Weibull/Gumbel entries only");
    if (!(x >= 0.0)) throw Error(ErrorKind::Domain, "L1 check needs x >= 0");

    const double rhs = cls == EvtClass::Weibull ? 0.0 : std::exp(-x);
    L1Report rep{x, {}, true};
    for (double t : t_grid) {
        const auto n = normalizers(spec, t);
        double lhs = 0.0;
        if (spec.bounded()) {
            const double cut = n.A_gap / n.B;
            lhs = integrate([&](double u) { return t * tail_gap(spec, n.A_gap - u * n.B); }, x, cut).value;
        } else {
            lhs = integrate([&](double u) { return t * tail(spec, n.A + u * n.B); }, x, kInf).value;
        }
        const double err = std::abs(lhs - rhs);
        if (!rep.rows.empty() && err > rep.rows.back().error) rep.monotone = false;
        rep.rows.push_back({t, lhs, rhs, err});
    }
    return rep;
}

} // namespace dcrp
