#include "dcrp/fitness.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>

#include "dcrp/error.hpp"

namespace dcrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;

std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view key) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw Error(ErrorKind::Parse, "bad number '" + std::string(text) + "' in '" + std::string(key) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::Parse, std::string(what) + " must be positive and finite");
}

} // namespace

const char* to_string(EvtClass c) {
    switch (c) {
    case EvtClass::Weibull: return "weibull";
    case EvtClass::Gumbel: return "gumbel";
    case EvtClass::Frechet: return "frechet";
    case EvtClass::None: return "none";
    }
    return "none";
}

FitnessSpec FitnessSpec::weibull(double alpha) {
    require_positive(alpha, "alpha");
    return {FitnessKind::WeibullPower, alpha};
}

FitnessSpec FitnessSpec::gumbel_bounded(double alpha) {
    require_positive(alpha, "alpha");
    return {FitnessKind::GumbelBoundedPower, alpha};
}

FitnessSpec FitnessSpec::gumbel_m(FitnessKind kind) {
    switch (kind) {
    case FitnessKind::GumbelExpInv:
    case FitnessKind::GumbelRatio:
    case FitnessKind::GumbelExpSqrt:
    case FitnessKind::GumbelTan:
    case FitnessKind::GumbelLogLog:
        return {kind, 0.0};
    default:
        throw Error(ErrorKind::Parse, "not a parameter-free m-function entry");
    }
}

FitnessSpec FitnessSpec::gumbel_unbounded(double alpha) {
    require_positive(alpha, "alpha");
    return {FitnessKind::GumbelUnbounded, alpha};
}

FitnessSpec FitnessSpec::frechet(double alpha) {
    require_positive(alpha, "alpha");
    return {FitnessKind::FrechetPareto, alpha};
}

FitnessSpec FitnessSpec::deterministic(double w) {
    require_positive(w, "w");
    return {FitnessKind::Deterministic, w};
}

FitnessSpec FitnessSpec::parse(std::string_view key) {
    auto parts = split(key, ':');
    // A trailing "p=v,..." segment carries parameters; everything before it is the kind.
    std::vector<std::pair<std::string_view, double>> params;
    if (parts.size() > 1 && parts.back().find('=') != std::string_view::npos) {
        for (auto kv : split(parts.back(), ',')) {
            auto eq = kv.find('=');
            if (eq == std::string_view::npos || eq == 0)
                throw Error(ErrorKind::Parse, "malformed parameter in '" + std::string(key) + "'");
            params.emplace_back(kv.substr(0, eq), parse_double(kv.substr(eq + 1), key));
        }
        parts.pop_back();
    }
    std::string kind;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) kind += ':';
        kind += parts[i];
    }

    auto take = [&](std::string_view name) -> double {
        if (params.size() != 1 || params[0].first != name)
            throw Error(ErrorKind::Parse, "'" + kind + "' expects exactly one parameter '" + std::string(name) + "'");
        return params[0].second;
    };
    auto none = [&] {
        if (!params.empty()) throw Error(ErrorKind::Parse, "'" + kind + "' takes no parameters");
    };

    if (kind == "weibull") return weibull(take("alpha"));
    if (kind == "gumbel-bounded" || kind == "gumbel-m:a") return gumbel_bounded(take("alpha"));
    if (kind == "gumbel-m:b") return none(), gumbel_m(FitnessKind::GumbelExpInv);
    if (kind == "gumbel-m:c") return none(), gumbel_m(FitnessKind::GumbelRatio);
    if (kind == "gumbel-m:d") return none(), gumbel_m(FitnessKind::GumbelExpSqrt);
    if (kind == "gumbel-m:e") return none(), gumbel_m(FitnessKind::GumbelTan);
    if (kind == "gumbel-m:loglog") return none(), gumbel_m(FitnessKind::GumbelLogLog);
    if (kind == "gumbel-unbounded") return gumbel_unbounded(take("alpha"));
    if (kind == "frechet") return frechet(take("alpha"));
    if (kind == "deterministic") return deterministic(take("w"));
    throw Error(ErrorKind::Parse, "unknown distribution '" + kind + "'");
}

std::string FitnessSpec::key() const {
    switch (kind_) {
    case FitnessKind::WeibullPower: return "weibull:alpha=" + format_double(param_);
    case FitnessKind::GumbelBoundedPower: return "gumbel-m:a:alpha=" + format_double(param_);
    case FitnessKind::GumbelExpInv: return "gumbel-m:b";
    case FitnessKind::GumbelRatio: return "gumbel-m:c";
    case FitnessKind::GumbelExpSqrt: return "gumbel-m:d";
    case FitnessKind::GumbelTan: return "gumbel-m:e";
    case FitnessKind::GumbelLogLog: return "gumbel-m:loglog";
    case FitnessKind::GumbelUnbounded: return "gumbel-unbounded:alpha=" + format_double(param_);
    case FitnessKind::FrechetPareto: return "frechet:alpha=" + format_double(param_);
    case FitnessKind::Deterministic: return "deterministic:w=" + format_double(param_);
    }
    return {};
}

EvtClass FitnessSpec::evt_class() const {
    switch (kind_) {
    case FitnessKind::WeibullPower: return EvtClass::Weibull;
    case FitnessKind::FrechetPareto: return EvtClass::Frechet;
    case FitnessKind::Deterministic: return EvtClass::None;
    default: return EvtClass::Gumbel;
    }
}

bool FitnessSpec::bounded() const {
    switch (kind_) {
    case FitnessKind::GumbelUnbounded:
    case FitnessKind::FrechetPareto:
    case FitnessKind::Deterministic:
        return false;
    default:
        return true;
    }
}

double FitnessSpec::essential_sup() const {
    if (kind_ == FitnessKind::Deterministic) return param_;
    return bounded() ? 1.0 : kInf;
}

double tail_gap(const FitnessSpec& spec, double g) {
    if (!spec.bounded()) throw Error(ErrorKind::Domain, "tail_gap needs a bounded entry");
    if (g <= 0.0) return 0.0;
    if (g >= 1.0) return 1.0;
    const double alpha = spec.param();
    switch (spec.kind()) {
    case FitnessKind::WeibullPower: return std::pow(g, alpha);
    case FitnessKind::GumbelBoundedPower: return std::exp(1.0 - std::pow(g, -alpha));
    case FitnessKind::GumbelExpInv: return std::exp(kE - std::exp(1.0 / g));
    case FitnessKind::GumbelRatio: return std::exp(-(1.0 - g) / g);
    case FitnessKind::GumbelExpSqrt: return std::exp(kE - std::exp(1.0 / std::sqrt(g)));
    case FitnessKind::GumbelTan: return std::exp(-1.0 / std::tan(0.5 * kPi * g));
    case FitnessKind::GumbelLogLog: {
        const double L = 1.0 - std::log(g);
        return std::exp(-L * std::log(L));
    }
    default: break;
    }
    return 0.0;
}

double tail(const FitnessSpec& spec, double x) {
    const double alpha = spec.param();
    switch (spec.kind()) {
    case FitnessKind::GumbelUnbounded:
        return x <= 0.0 ? 1.0 : std::exp(-std::pow(x, alpha));
    case FitnessKind::FrechetPareto:
        return x <= 1.0 ? 1.0 : std::pow(x, -alpha);
    case FitnessKind::Deterministic:
        return x < spec.param() ? 1.0 : 0.0;
    default:
        if (x >= 1.0) return 0.0;
        if (x <= 0.0) return 1.0;
        return tail_gap(spec, 1.0 - x);
    }
}

double quantile_upper(const FitnessSpec& spec, double u) {
    const double alpha = spec.param();
    const double e = -std::log(u); // m(w) = e for the Gumbel m-functions
    switch (spec.kind()) {
    case FitnessKind::WeibullPower: return 1.0 - std::pow(u, 1.0 / alpha);
    case FitnessKind::GumbelBoundedPower: return 1.0 - std::pow(1.0 + e, -1.0 / alpha);
    case FitnessKind::GumbelExpInv: return 1.0 - 1.0 / std::log(e + kE);
    case FitnessKind::GumbelRatio: return e / (1.0 + e);
    case FitnessKind::GumbelExpSqrt: {
        const double L = std::log(e + kE);
        return 1.0 - 1.0 / (L * L);
    }
    case FitnessKind::GumbelTan: return 2.0 / kPi * std::atan(e);
    case FitnessKind::GumbelLogLog: {
        // L log L = e  =>  L = exp(W0(e)).
        const double L = std::exp(boost::math::lambert_w0(e));
        return -std::expm1(1.0 - L);
    }
    case FitnessKind::GumbelUnbounded: return std::pow(e, 1.0 / alpha);
    case FitnessKind::FrechetPareto: return std::pow(u, -1.0 / alpha);
    case FitnessKind::Deterministic: return spec.param();
    }
    return 0.0;
}

Normalizers normalizers(const FitnessSpec& spec, double t) {
    const double alpha = spec.param();
    switch (spec.kind()) {
    case FitnessKind::Deterministic:
        throw Error(ErrorKind::NoNormalizers, "deterministic weights have no extreme value class");
    case FitnessKind::WeibullPower:
        if (!(t > 0.0)) throw Error(ErrorKind::UnsupportedHorizon, "t must be positive");
        return {1.0, std::pow(t, -1.0 / alpha), 0.0};
    case FitnessKind::FrechetPareto:
        if (!(t > 0.0)) throw Error(ErrorKind::UnsupportedHorizon, "t must be positive");
        return {0.0, std::pow(t, 1.0 / alpha), kInf};
    default: break;
    }

    if (!(t > 1.0)) throw Error(ErrorKind::UnsupportedHorizon, "log-based normalizers need t > 1, got " + format_double(t));
    const double lt = std::log(t);
    switch (spec.kind()) {
    case FitnessKind::GumbelBoundedPower: {
        const double l = 1.0 + lt;
        const double gap = std::pow(l, -1.0 / alpha);
        return {1.0 - gap, gap / (alpha * l), gap};
    }
    case FitnessKind::GumbelExpInv: {
        const double L = std::log(lt + kE);
        const double gap = 1.0 / L;
        return {1.0 - gap, 1.0 / ((lt + kE) * L * L), gap};
    }
    case FitnessKind::GumbelRatio: {
        const double gap = 1.0 / (1.0 + lt);
        return {1.0 - gap, gap * gap, gap};
    }
    case FitnessKind::GumbelExpSqrt: {
        const double L = std::log(lt + kE);
        const double gap = 1.0 / (L * L);
        return {1.0 - gap, 2.0 / ((lt + kE) * L * L * L), gap};
    }
    case FitnessKind::GumbelTan: {
        const double gap = 2.0 / kPi * std::atan(1.0 / lt);
        return {1.0 - gap, 2.0 / (kPi * (1.0 + lt * lt)), gap};
    }
    case FitnessKind::GumbelLogLog: {
        const double L = std::exp(boost::math::lambert_w0(lt));
        const double gap = std::exp(1.0 - L);
        return {1.0 - gap, gap / (1.0 + std::log(L)), gap};
    }
    case FitnessKind::GumbelUnbounded:
        return {std::pow(lt, 1.0 / alpha), std::pow(lt, 1.0 / alpha - 1.0) / alpha, kInf};
    default: break;
    }
    throw Error(ErrorKind::NoNormalizers, "unhandled catalog entry");
}

double phi_limit(const FitnessSpec& spec, double x) {
    switch (spec.evt_class()) {
    case EvtClass::Weibull: return x < 0.0 ? std::pow(-x, spec.param()) : 0.0;
    case EvtClass::Gumbel: return std::exp(-x);
    case EvtClass::Frechet: return x <= 0.0 ? kInf : std::pow(x, -spec.param());
    case EvtClass::None: break;
    }
    throw Error(ErrorKind::NoNormalizers, "deterministic weights have no limit tail");
}

} // namespace dcrp
