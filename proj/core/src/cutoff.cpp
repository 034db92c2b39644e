#include "logscar/cutoff.hpp"

#include "logscar/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace logscar {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

template <class F>
double composite(F&& f, double lo, double hi, int panels) {
    if (hi <= lo) return 0.0;
    const double h = (hi - lo) / panels;
    double s = 0.0;
    for (int i = 0; i < panels; ++i) s += Gauss::integrate(f, lo + i * h, lo + (i + 1) * h);
    return s;
}

double bump(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
}

} // namespace

CutoffProfile CutoffProfile::mollified_cosine(double delta) {
    if (!(delta > 0.0 && delta < 0.45)) throw ConfigError("mollifier width must lie in (0, 0.45)");
    CutoffProfile p;
    p.delta_ = delta;
    p.a_ = 1.0 - 1.05 * delta;
    p.support_ = p.a_ + delta;
    p.kernel_norm_ = delta * composite(bump, -1.0, 1.0, 16);
    const double a = p.a_, d = delta, z = p.kernel_norm_;
    const double k = std::numbers::pi / (2.0 * a);
    auto conv = [a, d, z](double u, auto&& g) {
        const double lo = std::max(-d, u - a);
        const double hi = std::min(d, u + a);
        if (hi <= lo) return 0.0;
        return composite([&](double v) { return g(u - v) * bump(v / d); }, lo, hi, 8) / z;
    };
    p.value_ = [conv, k](double u) { return conv(u, [k](double y) { return std::cos(k * y); }); };
    p.derivative_ = [conv, k](double u) { return conv(u, [k](double y) { return -k * std::sin(k * y); }); };
    p.compute_norms();
    return p;
}

CutoffProfile CutoffProfile::custom(std::function<double(double)> value, std::function<double(double)> derivative,
                                    double support) {
    if (!(support > 0.0 && support < 1.0)) throw ConfigError("cutoff support must lie strictly inside (-1, 1)");
    for (double u : {-support, support})
        if (std::abs(value(u)) > 1e-10 || std::abs(derivative(u)) > 1e-8)
            throw ConfigError("cutoff must vanish to first order at the edge of its support");
    for (int i = 0; i <= 2000; ++i) {
        const double u = -support + 2.0 * support * i / 2000.0;
        const double v = value(u);
        if (v < -1e-12 || v > 1.0 + 1e-12) throw ConfigError("cutoff values must lie in [0, 1]");
    }
    CutoffProfile p;
    p.support_ = support;
    p.value_ = std::move(value);
    p.derivative_ = std::move(derivative);
    p.compute_norms();
    return p;
}

void CutoffProfile::compute_norms() {
    const double s = support_;
    l2_ = std::sqrt(composite([this](double u) { return std::pow(value_(u), 2); }, -s, s, 64));
    dl2_ = std::sqrt(composite([this](double u) { return std::pow(derivative_(u), 2); }, -s, s, 64));
    mass_ = composite(value_, -s, s, 64);
    if (!(l2_ > 0.0)) throw NumericalError("cutoff has zero norm");
}

double CutoffProfile::value(double u) const { return std::abs(u) >= support_ ? 0.0 : value_(u); }

double CutoffProfile::derivative(double u) const { return std::abs(u) >= support_ ? 0.0 : derivative_(u); }

CutoffProfile make_cutoff(double epsilon2) {
    if (!(epsilon2 > 0.0 && epsilon2 < 0.5)) throw ConfigError("epsilon2 must lie in (0, 1/2)");
    const double target = (1.0 + epsilon2) * std::numbers::pi / 2.0;
    double lo = 0.01, hi = 0.44;
    if (CutoffProfile::mollified_cosine(lo).ratio() > target)
        throw ConfigError("cutoff family cannot reach the ratio (1 + epsilon2) pi/2 for this epsilon2");
    if (CutoffProfile::mollified_cosine(hi).ratio() <= target) return CutoffProfile::mollified_cosine(hi);
    for (int it = 0; it < 40 && hi - lo > 1e-7; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (CutoffProfile::mollified_cosine(mid).ratio() <= target) lo = mid;
        else hi = mid;
    }
    return CutoffProfile::mollified_cosine(lo);
}

double rayleigh_ratio(const std::function<double(double)>& f, const std::function<double(double)>& df) {
    const double n = composite([&](double u) { return f(u) * f(u); }, -1.0, 1.0, 64);
    const double d = composite([&](double u) { return df(u) * df(u); }, -1.0, 1.0, 64);
    if (!(n > 0.0)) throw NumericalError("zero profile");
    return std::sqrt(d / n);
}

} // namespace logscar
